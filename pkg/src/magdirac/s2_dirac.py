"""Dirac operators on the radius-1/2 sphere with a uniform field and point fluxes at the poles.

Separation of variables
-----------------------
Colatitude ``u`` in (0, pi), azimuth ``phi``.  After removing the half-density
``sqrt(sin u)`` and the azimuthal factor, sector ``q`` (a half-integer) reduces to

    D_q = 2 [ -i sigma_1 d/du + sigma_2 W(u) ],   W = (nu/2) cot(u/2) + (mu/2) tan(u/2),

where ``nu = q + alpha_N`` and ``mu = q + alpha_N + F`` are the effective flux
offsets at the north and south pole and ``F`` is the uniform flux over 2 pi.
Sectors are labelled by the integer ``j`` with ``q = j + 1/2``.

Boundary conditions
-------------------
The upper component takes the less singular Frobenius branch at each pole;
the lower component is allowed its square-integrable singular branch.  This
lets the singular part of the spinor point along the field at every flux
point.

Discretization
--------------
The upper component is written as ``f = s(u) F(u)`` with
``s = sin(u/2)^a cos(u/2)^b`` built from the Frobenius exponents ``a``, ``b``.
The squared operator turns into the weighted Sturm-Liouville problem

    -(s^2 F')' + s^2 V F = E s^2 F,     lambda = 2 sqrt(E),

which is discretized on a cell-centred uniform grid (nodes at (i + 1/2) h) with
zero flux through the poles, where the weight vanishes.  The symmetrized matrix
is tridiagonal.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import eigh_tridiagonal

FLUX_TOL = 1e-9


class S2Error(ValueError):
    pass


@dataclass(frozen=True)
class S2FieldConfig:
    point_fluxes: tuple  # ((pole, alpha), ...), pole in {"north", "south"}
    uniform_coefficient: float  # -2 (c + k)
    chern: int

    @property
    def alpha_north(self):
        return float(sum(a for p, a in self.point_fluxes if p == "north"))

    @property
    def alpha_south(self):
        return float(sum(a for p, a in self.point_fluxes if p == "south"))

    @property
    def uniform_flux(self):
        """Uniform flux divided by 2 pi, i.e. -(c + k)."""
        return 0.5 * float(self.uniform_coefficient)

    def total_flux(self):
        return self.alpha_north + self.alpha_south + self.uniform_flux


def build_beta(point_fluxes, c, k):
    """Field configuration: point fluxes plus the uniform part -2(c+k) vol/4.

    ``point_fluxes`` is a sequence of ``(pole, alpha)`` pairs.  The total flux
    sum(alpha) - (c + k) must be an integer (the Chern number).
    """
    pts = []
    for pole, alpha in point_fluxes:
        if pole not in ("north", "south"):
            raise S2Error(f"point fluxes must sit at a pole, got {pole!r}")
        if not 0 < alpha < 1:
            raise S2Error(f"point flux must lie in (0, 1), got {alpha!r}")
        pts.append((pole, alpha))
    exact = all(isinstance(a, (int, Fraction)) for _, a in pts) and isinstance(c, (int, Fraction))
    total = sum((a for _, a in pts), Fraction(0) if exact else 0.0) - (c + k)
    chern = round(total)
    if abs(total - chern) > (0 if exact else FLUX_TOL):
        raise S2Error(f"total flux {float(total)!r} is not an integer")
    return S2FieldConfig(tuple(pts), float(-2 * (c + k)), int(chern))


def free_config():
    return S2FieldConfig((), 0.0, 0)


def uniform_config(chern):
    """Uniform field with no point fluxes and the given Chern number."""
    return S2FieldConfig((), float(2 * chern), int(chern))


@dataclass(frozen=True)
class SectorData:
    j: int
    q: float
    nu: float
    mu: float

    @property
    def a(self):
        return max(self.nu, 1.0 - self.nu)

    @property
    def b(self):
        return max(-self.mu, 1.0 + self.mu)

    @property
    def ground_energy(self):
        """Constant potential left after removing the Frobenius envelope."""
        return 0.25 * ((self.a + self.b) ** 2 - (self.nu - self.mu) ** 2)

    @property
    def has_upper_zero_mode(self):
        return self.nu >= 0.5 and self.mu <= -0.5

    @property
    def has_lower_zero_mode(self):
        return self.nu < 0.5 and self.mu > -0.5

    @property
    def kernel_dim(self):
        return int(self.has_upper_zero_mode) + int(self.has_lower_zero_mode)


def sector(config, j):
    q = j + 0.5
    nu = q + config.alpha_north
    # a(pi) = chern - alpha_S; written this way mu is exact whenever alpha_S is
    mu = q + config.chern - config.alpha_south
    return SectorData(int(j), q, nu, mu)


def sector_lower_bound(config, j):
    """Smallest positive eigenvalue the sector can carry.

    The envelope leaves V = E0 and -(s^2 F')'/s^2 >= 0, so every eigenvalue of
    the squared sector operator is >= E0; with a zero mode present the bound is
    the first excited Jacobi level instead.
    """
    d = sector(config, j)
    a, b = d.a, d.b
    if d.has_upper_zero_mode:
        return 2.0 * math.sqrt(a + b + 1.0)  # (a+b+2)^2 - (a+b)^2 = 4(a+b+1)
    return 2.0 * math.sqrt(max(d.ground_energy, 0.0))


def _weights_log(d, u):
    x = 0.5 * u
    return 2.0 * d.a * np.log(np.sin(x)) + 2.0 * d.b * np.log(np.cos(x))


def _potential(d, u):
    x = 0.5 * u
    nu, mu, a, b = d.nu, d.mu, d.a, d.b
    # coefficients vanish for the Frobenius exponents; kept so V is computed, not assumed
    c_csc = 0.25 * (nu * (nu - 1.0) - a * (a - 1.0))
    c_sec = 0.25 * (mu * (mu + 1.0) - b * (b - 1.0))
    return c_csc / np.sin(x) ** 2 + c_sec / np.cos(x) ** 2 + d.ground_energy


def sector_matrix(d, n):
    """Diagonal and off-diagonal of the symmetrized sector operator on n cells."""
    h = math.pi / n
    u = (np.arange(n) + 0.5) * h
    faces = np.arange(1, n) * h
    lw = _weights_log(d, u)
    lwf = _weights_log(d, faces)
    # w_face / w_i, w_face / sqrt(w_i w_{i+1}) evaluated in log space
    left = np.zeros(n)
    right = np.zeros(n)
    right[:-1] = np.exp(lwf - lw[:-1])
    left[1:] = np.exp(lwf - lw[1:])
    diag = (left + right) / h ** 2 + _potential(d, u)
    off = -np.exp(lwf - 0.5 * (lw[:-1] + lw[1:])) / h ** 2
    return diag, off


def _roundoff(d, n, energies):
    """Roundoff floor for lambda = 2 sqrt(E): eps * ||matrix|| / sqrt(E), with a safety factor."""
    diag, _ = sector_matrix(d, n)
    scale = 64.0 * np.finfo(float).eps * float(np.max(np.abs(diag)))
    return scale / np.sqrt(np.maximum(energies, scale))


def _energies(d, n, count=None, e_max=None):
    diag, off = sector_matrix(d, n)
    skip = 1 if d.has_upper_zero_mode else 0
    if count is not None:
        ev = eigh_tridiagonal(diag, off, eigvals_only=True, select="i",
                              select_range=(0, min(n - 1, count + skip - 1)))
    else:
        ev = eigh_tridiagonal(diag, off, eigvals_only=True, select="v",
                              select_range=(-1.0, e_max))
    return np.sort(ev)[skip:]


@dataclass
class SectorSpectrum:
    j: int
    values: np.ndarray
    errors: np.ndarray
    kernel_dim: int
    n: int
    converged: bool


def solve_sector(config, j, n=4000, lam_max=None, count=None, tol=1e-3):
    """Positive eigenvalues of sector j on grids n and 2n.

    Values come from the 2n grid; the error estimate is |lambda_2n - lambda_n| / 3
    (second-order Richardson).  Either ``lam_max`` or ``count`` selects the
    eigenvalues.  ``converged`` is False when an estimate exceeds ``tol``.
    """
    d = sector(config, j)
    if count is None:
        if lam_max is None:
            raise S2Error("give lam_max or count")
        e_max = 0.25 * lam_max ** 2
        fine = _energies(d, 2 * n, e_max=e_max)
        fine = fine[fine <= e_max]
    else:
        fine = _energies(d, 2 * n, count=count)
    m = len(fine)
    coarse = _energies(d, n, count=m) if m else np.empty(0)
    lam_f = 2.0 * np.sqrt(np.clip(fine, 0.0, None))
    lam_c = 2.0 * np.sqrt(np.clip(coarse[:m], 0.0, None))
    err = np.abs(lam_f - lam_c) / 3.0 + _roundoff(d, 2 * n, fine)
    return SectorSpectrum(d.j, lam_f, err, d.kernel_dim, n, bool(np.all(err <= tol)))


def convergence_order(config, j, n=500, count=10):
    """Observed order from grids n, 2n, 4n for the lowest ``count`` eigenvalues."""
    d = sector(config, j)
    energies = [_energies(d, g, count=count) for g in (n, 2 * n, 4 * n)]
    lams = [2.0 * np.sqrt(np.clip(e, 0, None)) for e in energies]
    d1 = np.abs(lams[0] - lams[1])
    d2 = np.abs(lams[1] - lams[2])
    # levels resolved down to roundoff carry no order information
    noise = 10.0 * _roundoff(d, 4 * n, energies[2])
    ok = (d2 > noise) & (d1 > noise)
    return np.log2(d1[ok] / d2[ok])


@dataclass
class S2Spectrum:
    values: list  # merged positive eigenvalues, ascending
    multiplicities: list
    errors: list
    kernel_dim: int
    n: int
    sectors: list = field(default_factory=list)
    converged: bool = True

    def rows(self):
        return list(zip(self.values, self.multiplicities, self.errors))


def sector_range(config, lam_max):
    """Sectors whose lower bound does not exceed lam_max.

    The bound grows like 2|q| once |q| exceeds the flux offsets, so the search
    stops after a run of sectors beyond both offsets that all exceed lam_max.
    """
    reach = int(abs(config.alpha_north) + abs(config.uniform_flux) + 2)
    out = []
    for j in range(-reach - int(lam_max) - 4, reach + int(lam_max) + 4):
        if sector_lower_bound(config, j) <= lam_max:
            out.append(j)
    lo, hi = -reach - int(lam_max) - 4, reach + int(lam_max) + 3
    if out and (out[0] == lo or out[-1] == hi):
        raise S2Error("sector search window too small for the requested lam_max")
    return out


def _merge(vals, errs, floor=1e-6):
    order = np.argsort(vals, kind="stable")
    groups = []
    for i in order:
        v, e = vals[i], errs[i]
        if groups and v - groups[-1][0][-1] <= max(2.0 * (e + groups[-1][2]), floor * max(1.0, v)):
            g = groups[-1]
            g[0].append(v)
            g[1] += 1
            g[2] = max(g[2], e)
        else:
            groups.append([[v], 1, e])
    return ([float(np.mean(g[0])) for g in groups], [g[1] for g in groups],
            [float(g[2] + (max(g[0]) - min(g[0]))) for g in groups])


def assemble_s2_spectrum(config, lam_max, n=4000, q_range=None, workers=1, tol=1e-3):
    """Merged spec_+ below lam_max with multiplicities and the kernel dimension.

    The kernel dimension counts all sectors (only finitely many carry zero
    modes); eigenvalues are collected from ``q_range`` (sector indices j) or
    from every sector whose lower bound is at most ``lam_max``.
    """
    needed = sector_range(config, lam_max)
    if q_range is None:
        js = needed
    else:
        js = sorted(set(int(j) for j in q_range))
        missing = sorted(set(needed) - set(js))
        if missing:
            raise S2Error(f"sectors {missing} can reach below {lam_max} but are outside q_range")

    def run(j):
        return solve_sector(config, j, n=n, lam_max=lam_max, tol=tol)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run, js))
    else:
        parts = [run(j) for j in js]
    vals = np.concatenate([p.values for p in parts]) if parts else np.empty(0)
    errs = np.concatenate([p.errors for p in parts]) if parts else np.empty(0)
    v, m, e = _merge(vals, errs)
    return S2Spectrum(v, m, e, kernel_dimension(config), n, parts, all(p.converged for p in parts))


def kernel_dimension(config):
    """Number of zero modes, summed over all sectors.

    A sector has an upper zero mode iff nu >= 1/2 and mu <= -1/2, and a lower
    one iff nu < 1/2 and mu > -1/2; both conditions fail for |q| large.
    """
    span = int(abs(config.alpha_north) + abs(config.uniform_flux) + 3)
    return sum(sector(config, j).kernel_dim for j in range(-span, span + 1))
