"""Spectrum of the (-) Dirac operator for magnetic Hopf links.

Fluxes alpha_k on K Hopf fibres split as sum(alpha) = c + m with c in (-1/2, 1/2].
For every integer k the spectrum receives

* the explicit values  k + c - 1/2 (m > k)  or  -k - c - 1/2 (m < k),
  with multiplicity |m - k|;
* the values  +-sqrt(lambda^2 + (k + c)^2) - 1/2  for lambda in spec_+ of the
  two-dimensional Dirac operator on the radius-1/2 sphere whose field has
  point fluxes alpha at the fibre base points and Chern number m - k.
"""

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from . import s2_dirac

HALF = Fraction(1, 2)
SNAP_TOL = 1e-12


class HopfError(ValueError):
    pass


def _is_exact(x):
    return isinstance(x, (int, Fraction))


def derive_cm(fluxes):
    """Split sum(fluxes) = c + m with c in (-1/2, 1/2] and m an integer.

    Exact for ``Fraction`` input; float sums within 1e-12 of m + 1/2 are
    snapped to c = 1/2 with a warning.
    """
    fluxes = list(fluxes)
    if all(_is_exact(a) for a in fluxes):
        total = sum((Fraction(a) for a in fluxes), Fraction(0))
        m = math.ceil(total - HALF)
        return total - m, int(m)
    total = math.fsum(float(a) for a in fluxes)
    near = round(total - 0.5)
    if abs(total - 0.5 - near) <= SNAP_TOL:
        if total - 0.5 != near:
            warnings.warn(f"flux sum {total!r} treated as {near} + 1/2", stacklevel=2)
        return HALF, int(near)
    m = math.ceil(total - 0.5)
    return total - m, int(m)


def is_half(c):
    return c == HALF if _is_exact(c) else c == 0.5


@dataclass(frozen=True)
class Row:
    value: float
    multiplicity: int
    branch: str  # "Zk" or "continuous"
    k: int
    lam: float = None
    error_estimate: float = None
    spin: int = 0  # sign(m - k) on Zk rows


@dataclass
class SpectrumTable:
    rows: list = field(default_factory=list)
    c: object = None
    m: int = None
    window: tuple = None

    def sorted_rows(self):
        return sorted(self.rows, key=lambda r: (r.value, r.k, r.branch, r.lam or 0.0))

    def total_multiplicity(self):
        return sum(r.multiplicity for r in self.rows)

    def merged(self, tol=1e-6):
        """(value, multiplicity, error) with rows closer than tol plus their errors combined."""
        out = []
        for r in self.sorted_rows():
            e = r.error_estimate or 0.0
            if out and r.value - out[-1][3] <= max(tol, 2.0 * (e + out[-1][2])):
                v, mult, err, _ = out[-1]
                out[-1] = [v, mult + r.multiplicity, max(err, e), r.value]
            else:
                out.append([r.value, r.multiplicity, e, r.value])
        return [(v, mult, err) for v, mult, err, _ in out]


def z_branch(k, c, m):
    """Explicit eigenvalues contributed by sector k, with multiplicity |m - k|."""
    if m > k:
        return [(k + c - HALF if _is_exact(c) else k + c - 0.5, m - k)]
    if m < k:
        return [(-k - c - HALF if _is_exact(c) else -k - c - 0.5, k - m)]
    return []


POLES = {"north": "north", "south": "south", "n": "north", "s": "south"}


def _pole_of(point):
    if isinstance(point, str):
        if point.lower() not in POLES:
            raise HopfError(f"unknown pole tag {point!r}")
        return POLES[point.lower()]
    theta, _ = point
    if abs(theta) < 1e-14:
        return "north"
    if abs(theta - math.pi) < 1e-14:
        return "south"
    return None


@dataclass
class HopfConfig:
    fluxes: tuple
    points: tuple = None  # pole tags or (colatitude, longitude) on S^2

    def __post_init__(self):
        self.fluxes = tuple(self.fluxes)
        if not self.fluxes:
            raise HopfError("at least one flux is required")
        for a in self.fluxes:
            if not 0 < a < 1:
                raise HopfError(f"fluxes must lie in (0, 1), got {a!r}")
        if self.points is None:
            default = ("north", "south")
            self.points = default[: len(self.fluxes)] if len(self.fluxes) <= 2 else None
        if self.points is not None:
            self.points = tuple(self.points)
            if len(self.points) != len(self.fluxes):
                raise HopfError("one base point per flux is required")
        self.c, self.m = derive_cm(self.fluxes)

    @property
    def K(self):
        return len(self.fluxes)

    def pole_fluxes(self):
        """((pole, alpha), ...) or None when some point is off the poles."""
        if self.points is None:
            return None
        out = []
        for p, a in zip(self.points, self.fluxes):
            pole = _pole_of(p)
            if pole is None:
                return None
            out.append((pole, a))
        return tuple(out)

    def s2_config(self, k):
        pf = self.pole_fluxes()
        if pf is None:
            raise HopfError("numerical sphere spectra need all base points at the poles")
        return s2_dirac.build_beta(pf, self.c, k)


def numerical_s2_provider(config, n=4000, workers=1):
    """Provider (k, lam_max) -> S2Spectrum using the finite-difference sphere solver."""
    def provide(k, lam_max):
        return s2_dirac.assemble_s2_spectrum(config.s2_config(k), lam_max, n=n, workers=workers)
    return provide


def k_range(c, bound):
    """All k with |k + c| <= bound + 1/2."""
    cf = float(c)
    lim = bound + 0.5
    return [k for k in range(math.floor(-lim - cf) - 1, math.ceil(lim - cf) + 2) if abs(k + cf) <= lim]


def assemble_spectrum(config, window, s2_provider=None, n=4000):
    """All eigenvalues in the closed window [a, b], tagged by branch and sector."""
    a, b = float(window[0]), float(window[1])
    if not a <= b:
        raise HopfError("window must satisfy a <= b")
    provider = s2_provider or numerical_s2_provider(config, n=n)
    c, m = config.c, config.m
    cf = float(c)
    bound = max(abs(a), abs(b))
    table = SpectrumTable(c=c, m=m, window=(a, b))
    missing = []
    for k in k_range(c, bound):
        for val, mult in z_branch(k, c, m):
            if a <= float(val) <= b:
                table.rows.append(Row(float(val), mult, "Zk", k, spin=(1 if m > k else -1)))
        kap2 = (k + cf) ** 2
        lam_max2 = (bound + 0.5) ** 2 - kap2
        if lam_max2 <= 0:
            continue
        try:
            spec = provider(k, math.sqrt(lam_max2))
        except Exception as exc:  # collected so the error lists every sector
            missing.append((k, str(exc)))
            continue
        for lam, mult, err in spec.rows():
            root = math.sqrt(lam * lam + kap2)
            dv = err * lam / root
            for sgn in (1, -1):
                v = sgn * root - 0.5
                if a <= v <= b:
                    table.rows.append(Row(v, mult, "continuous", k, lam, dv))
    if missing:
        raise HopfError("sphere spectra unavailable for sectors "
                        + ", ".join(f"k={k} ({msg})" for k, msg in missing))
    table.rows = table.sorted_rows()
    return table


@dataclass(frozen=True)
class KernelDimension:
    count: int  # zero modes certainly present
    upper: int  # zero modes possibly present
    method: str  # "exact" or "numerical"

    @property
    def conclusive(self):
        return self.count == self.upper


def kernel_dimension(config, tol=1e-6, n=4000):
    """dim ker; exact when the flux sum is m + 1/2, numerical otherwise.

    At c = 1/2 the value 0 only arises from the explicit branch of k = 0
    (multiplicity m when m > 0): a continuous value vanishes only for
    lambda^2 = 1/4 - (k + 1/2)^2 <= 0.
    """
    c, m = config.c, config.m
    if is_half(c):
        return KernelDimension(max(m, 0), max(m, 0), "exact")
    cf = float(c)
    # explicit values never vanish for c != 1/2; the continuous ones need k = 0
    crit = math.sqrt(0.25 - cf * cf)
    spec = s2_dirac.assemble_s2_spectrum(config.s2_config(0), crit + 0.5, n=n)
    sure = maybe = 0
    for lam, mult, err in spec.rows():
        d = abs(lam - crit)
        if d <= tol:
            sure += mult
            maybe += mult
        elif d <= tol + err:
            maybe += mult
    return KernelDimension(sure, maybe, "numerical")


@dataclass(frozen=True)
class ScanRow:
    alpha: float
    c: float
    m: int
    k: int  # sector attaining the gap
    critical: float
    nearest: float
    gap: float
    error_estimate: float
    status: str  # "pass" or "inconclusive"


def _nearest_level(s2cfg, crit, n, workers):
    lam_max = crit + 1.0
    while True:
        spec = s2_dirac.assemble_s2_spectrum(s2cfg, lam_max, n=n, workers=workers)
        if spec.values:
            best = min(spec.rows(), key=lambda r: abs(r[0] - crit))
            # nothing above lam_max can be closer than lam_max - crit
            if abs(best[0] - crit) <= lam_max - crit:
                return best
        lam_max *= 2.0


def circle_zero_mode_scan(alpha_grid, n=4000, workers=1):
    """Distance of the sphere spectrum from the value that would create a zero mode.

    For one Hopf fibre with flux alpha, a zero mode can only come from sector
    k with |k + c| <= 1/2 and lambda = sqrt(1/4 - (k + c)^2).  The reported gap
    is the smallest distance |lambda - critical| over those sectors; a row passes
    when gap exceeds its Richardson error estimate.
    """
    rows = []
    for alpha in alpha_grid:
        cfg = HopfConfig((alpha,), ("north",))
        c, m = cfg.c, cfg.m
        if any(v == 0 for k in (-1, 0, 1) for v, _ in z_branch(k, c, m)):
            raise HopfError(f"explicit branch vanishes at alpha={alpha!r}")
        ks = [0, -1] if is_half(c) else [0]
        best = None
        for k in ks:
            kap = float(k + c)
            crit = math.sqrt(max(0.25 - kap * kap, 0.0))
            lam, _, err = _nearest_level(cfg.s2_config(k), crit, n, workers)
            gap = abs(lam - crit)
            cand = (gap - err, k, crit, lam, gap, err)
            if best is None or cand < best:
                best = cand
        _, k, crit, lam, gap, err = best
        rows.append(ScanRow(float(alpha), float(c), m, k, crit, lam, gap, err,
                            "pass" if gap - err > 0 else "inconclusive"))
    return rows
