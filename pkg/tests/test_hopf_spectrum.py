import math
import time
import warnings
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from magdirac import s2_dirac
from magdirac.hopf_spectrum import (HALF, HopfConfig, HopfError, assemble_spectrum,
                                    circle_zero_mode_scan, derive_cm, k_range, kernel_dimension,
                                    z_branch)


def test_derive_cm_examples():
    assert derive_cm([F(7, 10), F(4, 5)]) == (HALF, 1)
    assert derive_cm([F(1, 5)]) == (F(1, 5), 0)
    assert derive_cm([F(9, 10)]) == (F(-1, 10), 1)
    c, m = derive_cm([0.9])
    assert m == 1 and c == pytest.approx(-0.1)


def test_derive_cm_snaps_half_with_warning():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        c, m = derive_cm([0.7, 0.8 + 1e-13])
    assert c == HALF and m == 1
    assert rec
    c, m = derive_cm([0.7, 0.8 + 1e-9])
    assert c != HALF


@given(st.lists(st.fractions(F(1, 1000), F(999, 1000)), min_size=1, max_size=5))
def test_derive_cm_properties(fl):
    c, m = derive_cm(fl)
    assert -HALF < c <= HALF
    assert c + m == sum(fl)
    # (c, m) depends only on the sum: shifting one flux by an integer shifts m only
    c2, m2 = derive_cm(fl + [F(1)])
    assert c2 == c and m2 == m + 1


def test_z_branch_examples():
    assert z_branch(0, F(3, 10), 1) == [(F(-1, 5), 1)]
    assert z_branch(0, HALF, 2) == [(0, 2)]
    assert z_branch(2, HALF, 2) == []
    assert z_branch(3, F(3, 10), 1) == [(-3 - F(3, 10) - HALF, 2)]


@pytest.mark.parametrize("fluxes,m", [
    ((F(1, 2),), 0),
    ((F(7, 10), F(4, 5)), 1),
    ((F(9, 10), F(4, 5), F(4, 5)), 2),
    ((F(9, 10), F(9, 10), F(9, 10), F(4, 5)), 3),
])
def test_kernel_dimension_fast_path(fluxes, m):
    t = time.perf_counter()
    kd = kernel_dimension(HopfConfig(fluxes))
    assert time.perf_counter() - t < 1.0
    assert kd.method == "exact" and kd.count == kd.upper == m


def test_kernel_dimension_numerical_path():
    kd = kernel_dimension(HopfConfig((0.3,)), n=1000)
    assert kd.method == "numerical" and kd.count == kd.upper == 0
    kd = kernel_dimension(HopfConfig((0.6, 0.3)), n=1000)
    assert kd.count == kd.upper == 0


def test_window_around_zero_at_half():
    cfg = HopfConfig((F(3, 4), F(3, 4), F(1, 2), F(1, 2)))  # sum 5/2: c = 1/2, m = 2
    assert (cfg.c, cfg.m) == (HALF, 2)
    cfg.points = ("north", "north", "south", "south")
    tab = assemble_spectrum(cfg, (-0.25, 0.25), n=800)
    zeros = [r for r in tab.rows if abs(r.value) < 1e-9]
    assert sum(r.multiplicity for r in zeros) == 2
    assert all(r.branch == "Zk" and r.k == 0 for r in zeros)
    assert all(r.branch == "Zk" for r in tab.rows)


def free_s3(nmax):
    return {s * (1.5 + n): (n + 1) * (n + 2) for n in range(nmax + 1) for s in (1, -1)}


def test_free_limit():
    tab = assemble_spectrum(HopfConfig((1e-3,)), (-4.75, 4.75))
    merged = tab.merged(tol=0.02)
    ref = free_s3(3)
    assert len(merged) == len(ref)
    for (v, mult, err), (rv, rm) in zip(merged, sorted(ref.items())):
        assert abs(v - rv) <= max(5 * err, 1e-2)
        assert mult == rm


def test_k_truncation():
    for c in (F(-2, 5), F(0), F(3, 10), HALF):
        for bound in (0.5, 2.0, 3.7):
            ks = set(k_range(c, bound))
            for k in range(-12, 13):
                if k in ks:
                    continue
                # every value from an omitted k lies outside [-bound, bound]
                assert abs(k + c) - HALF > bound
                for v, _ in z_branch(k, c, 0):
                    assert abs(v) > bound


def test_multiplicity_accounting():
    cfg = HopfConfig((0.35, 0.8))
    tab = assemble_spectrum(cfg, (-3, 3), n=800)
    merged = tab.merged()
    assert sum(m for _, m, _ in merged) == tab.total_multiplicity()
    zk = [r for r in tab.rows if r.branch == "Zk"]
    assert all(r.multiplicity == abs(cfg.m - r.k) for r in zk)
    assert all(r.spin == (1 if cfg.m > r.k else -1) for r in zk)
    assert all(r.lam > 0 for r in tab.rows if r.branch == "continuous")


def test_branch_continuity():
    a = assemble_spectrum(HopfConfig((0.3, 0.55)), (-2.5, 2.5), n=1500)
    b = assemble_spectrum(HopfConfig((0.3 + 1e-4, 0.55)), (-2.5, 2.5), n=1500)
    va = [r.value for r in a.rows if -2.4 < r.value < 2.4]
    vb = [r.value for r in b.rows if -2.4 < r.value < 2.4]
    assert len(va) == len(vb)
    assert max(abs(x - y) for x, y in zip(va, vb)) <= 1e-3


def test_missing_sectors_reported():
    cfg = HopfConfig((0.3, 0.4, 0.5))
    with pytest.raises(HopfError, match="k="):
        assemble_spectrum(cfg, (-1, 1))


def test_custom_provider_failure_lists_sectors():
    cfg = HopfConfig((0.3,))

    def provider(k, lam_max):
        if k == 0:
            raise RuntimeError("no data")
        return s2_dirac.assemble_s2_spectrum(cfg.s2_config(k), lam_max, n=300)

    with pytest.raises(HopfError, match="k=0"):
        assemble_spectrum(cfg, (-2, 2), provider)


def test_circle_scan_examples():
    rows = circle_zero_mode_scan([0.3, 0.5, 0.85], n=1000)
    assert [r.status for r in rows] == ["pass"] * 3
    half = rows[1]
    assert half.c == 0.5 and half.m == 0 and half.critical == 0.0
    assert all(r.gap > r.error_estimate for r in rows)


def test_config_validation():
    with pytest.raises(HopfError):
        HopfConfig(())
    with pytest.raises(HopfError):
        HopfConfig((0.0,))
    with pytest.raises(HopfError):
        HopfConfig((0.2, 0.3), ("north",))
