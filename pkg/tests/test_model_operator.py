import math

import numpy as np
import pytest

from magdirac.model_operator import (DEFAULT_NMAX, ModelError, RadialGrid, apply_dirac,
                                     apply_extension_action, boundary_form, deficiency_element,
                                     deficiency_residual, energy_decoupling_check,
                                     extension_action_residual, graph_norm2,
                                     graph_norm_lower_bound, regular_bump, singular_l2_norm,
                                     singular_mode)
from magdirac.special_functions import c_alpha

ELL = 2 * math.pi
# 3 * C_0.3 from an mpmath quadrature of r K_0.3(r)^2
TWO_MODE_NORM = 1.7474499348529199196


def test_deficiency_coefficients_j0():
    e = deficiency_element(ELL, 0.3, {0: 1}, 1)
    assert e.down_factor(0) == 1
    e = deficiency_element(ELL, 0.3, {0: 1}, -1)
    assert e.down_factor(0) == -1


@pytest.mark.parametrize("n", [-3, -1, 1, 2, 5])
def test_deficiency_factor_modulus(n):
    for sign in (1, -1):
        e = deficiency_element(ELL, 0.4, {n: 1}, sign)
        assert abs(e.down_factor(n)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("alpha", [0.1, 0.3, 0.5, 0.7, 0.9])
@pytest.mark.parametrize("sign", [1, -1])
def test_deficiency_residual(alpha, sign):
    e = deficiency_element(ELL, alpha, {0: 1.0, 1: 0.5 - 0.25j, -2: 0.3j}, sign)
    assert deficiency_residual(e) <= 1e-6


def _fd_dirac(field, s, r, th, h=1e-5):
    """(D f)(s, r, theta) by central differences of a pointwise field."""
    def at(ds=0.0, dr=0.0, dt=0.0):
        return [np.asarray(v) for v in field(s + ds, r + dr, th + dt)]
    up, dn = at()
    ups, dns = [(p - m) / (2 * h) for p, m in zip(at(ds=h), at(ds=-h))]
    upr, dnr = [(p - m) / (2 * h) for p, m in zip(at(dr=h), at(dr=-h))]
    upt, dnt = [(p - m) / (2 * h) for p, m in zip(at(dt=h), at(dt=-h))]
    return field, up, dn, ups, dns, upr, dnr, upt, dnt


@pytest.mark.parametrize("sign", [1, -1])
def test_deficiency_pointwise_finite_difference(sign):
    alpha = 0.35
    e = deficiency_element(ELL, alpha, {0: 1.0, 1: 0.4j, -1: -0.2}, sign)
    rng = np.random.default_rng(3)
    s = rng.uniform(0, ELL, 20)
    r = rng.uniform(0.2, 3.0, 20)
    th = rng.uniform(0, 2 * math.pi, 20)
    _, up, dn, ups, dns, upr, dnr, upt, dnt = _fd_dirac(e.evaluate, s, r, th)
    e_m = np.exp(-1j * th)
    e_p = np.exp(1j * th)
    d_up = -1j * ups - 1j * e_m * (dnr + (-1j * dnt + alpha * dn) / r)
    d_dn = 1j * dns - 1j * e_p * (upr - (-1j * upt + alpha * up) / r)
    res = np.abs(d_up - 1j * sign * up) + np.abs(d_dn - 1j * sign * dn)
    scale = np.abs(up) + np.abs(dn)
    assert np.max(res / scale) < 1e-6


def test_extension_action_j0_examples():
    out = apply_extension_action(singular_mode(ELL, 0.3, {0: 1}, 1))
    assert out.up == {0: 0} and out.down == {0: 1j}
    out = apply_extension_action(singular_mode(ELL, 0.3, {0: 1}, -1))
    assert out.up == {0: 1j} and out.down == {0: 0}


@pytest.mark.parametrize("sign", [1, -1])
def test_extension_action_residual(sign):
    lam = {n: (1 + 0.5j) / (1 + abs(n)) for n in range(-8, 9)}
    mode = singular_mode(ELL, 0.45, lam, sign)
    assert extension_action_residual(mode) <= 1e-6


def test_singular_norm_examples():
    assert singular_l2_norm(singular_mode(ELL, 0.5, {0: 1}, -1)) == pytest.approx(math.pi / 4, rel=1e-10)
    assert singular_l2_norm(singular_mode(ELL, 0.5, {}, -1)) == 0.0
    m = singular_mode(ELL, 0.3, {0: 1, 1: 2j}, -1)
    assert singular_l2_norm(m) == pytest.approx(TWO_MODE_NORM, rel=1e-10)


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("sign", [1, -1])
def test_singular_norm_matches_grid(alpha, sign):
    m = singular_mode(ELL, alpha, {0: 1, 1: 0.5j, -3: 0.2}, sign)
    grid_val = m.on_grid().norm2()
    assert singular_l2_norm(m) == pytest.approx(grid_val, rel=1e-6)


@pytest.mark.parametrize("alpha", [0.15, 0.5, 0.85])
@pytest.mark.parametrize("sign", [1, -1])
def test_graph_norm_bound(alpha, sign):
    # a pure singular part has ||f||^2 + ||Df||^2 = (C_a + C_{1-a}) sum |lambda_n|^2 exactly
    lam = {0: 1.0, 1: 0.3 - 0.2j, -2: 0.5j}
    f = singular_mode(ELL, alpha, lam, sign).on_grid()
    weight = sum(abs(v) ** 2 for v in lam.values())
    bound = graph_norm_lower_bound(alpha) * weight
    assert graph_norm2(f) == pytest.approx(bound, rel=1e-6)
    # adding a regular bump only increases it
    bump = regular_bump(f.grid, ELL, alpha, {(1, 0): (0.3, 0.2j)})
    assert graph_norm2(f + bump) >= bound - 1e-9


def test_graph_bound_symmetry_and_monotonicity():
    grid = np.linspace(0.02, 0.5, 25)
    vals = [graph_norm_lower_bound(a) for a in grid]
    assert all(x > y for x, y in zip(vals, vals[1:]))
    for a in (0.1, 0.27, 0.4):
        assert graph_norm_lower_bound(a) == pytest.approx(graph_norm_lower_bound(1 - a), rel=1e-12)
    assert graph_norm_lower_bound(0.5) == pytest.approx(math.pi / 2, rel=1e-10)


def test_energy_decoupling():
    g = RadialGrid()
    bump = regular_bump(g, ELL, 0.3, {(0, 0): (1, 0.5), (1, -1): (0.2j, 1), (-2, 2): (0.3, -0.1)})
    assert energy_decoupling_check(bump) <= 1e-8
    for sign in (1, -1):
        f = singular_mode(ELL, 0.3, {0: 1, 2: 0.5, -1: 0.25j}, sign).on_grid(g)
        assert energy_decoupling_check(f) <= 1e-6


def test_energy_decoupling_zero_function():
    g = RadialGrid()
    z = regular_bump(g, ELL, 0.3, {(0, 0): (0, 0)})
    assert energy_decoupling_check(z) == 0.0


def test_boundary_form():
    g = RadialGrid()
    a = 0.3
    p1 = singular_mode(ELL, a, {0: 1, 1: 0.5}, 1).on_grid(g)
    p2 = singular_mode(ELL, a, {0: 0.3j, 1: 1}, 1).on_grid(g)
    m1 = singular_mode(ELL, a, {0: 1, 1: 0.5}, -1).on_grid(g)
    m2 = singular_mode(ELL, a, {0: 1, 1: -1j}, -1).on_grid(g)
    assert boundary_form(p1, p2) == 0
    assert boundary_form(m1, m2) == 0
    cross = boundary_form(p1, m1)
    assert abs(cross) > 0.1
    # agrees with <Df, g> - <f, Dg> from quadrature
    direct = apply_dirac(p1).inner(m1) - p1.inner(apply_dirac(m1))
    assert abs(cross - direct) <= 1e-3 * abs(cross)


def test_profiles_decay():
    g = RadialGrid()
    f = singular_mode(ELL, 0.4, {0: 1, 1: 1}, -1).on_grid(g)
    d = f.comps[(0, -1)][1]
    assert abs(d[-1]) < 1e-15
    e = deficiency_element(ELL, 0.4, {0: 1}, 1).on_grid(g)
    u = e.comps[(0, -1)][0]
    assert abs(u[-1]) / abs(u[g.n // 2]) < 1e-15


def test_c_alpha_sum_matches_closed_form():
    for a in (0.1, 0.3, 0.6):
        closed = math.pi * a / (2 * math.sin(math.pi * a)) + math.pi * (1 - a) / (2 * math.sin(math.pi * a))
        assert c_alpha(a).value + c_alpha(1 - a).value == pytest.approx(closed, rel=1e-10)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.3])
def test_alpha_domain(alpha):
    with pytest.raises(ModelError):
        deficiency_element(ELL, alpha, {0: 1}, 1)
    with pytest.raises(ModelError):
        singular_mode(ELL, alpha, {0: 1}, 1)
    with pytest.raises(ModelError):
        graph_norm_lower_bound(alpha)


def test_truncation_limit():
    with pytest.raises(ModelError):
        singular_mode(ELL, 0.3, {DEFAULT_NMAX + 1: 1}, 1)
    with pytest.raises(ModelError):
        deficiency_element(ELL, 0.3, {0: 1}, 0)
