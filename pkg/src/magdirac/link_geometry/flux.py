"""Flux vectors on the periodic interval [0, 1]_per, slopes and phase jumps."""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sphere import GeometryError


def _exact(x):
    """Rational value of a flux; floats go through their shortest decimal repr."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class FluxVector:
    alphas: tuple

    def __post_init__(self):
        for a in self.alphas:
            if not 0 <= a < 1:
                raise GeometryError(f"fluxes must lie in [0, 1), got {a!r}")

    def __len__(self):
        return len(self.alphas)


def dist_per(a, b):
    """Distance on [0, 1]_per: min(|a - b| mod 1, 1 - |a - b| mod 1), computed exactly."""
    d = abs(_exact(a) - _exact(b)) % 1
    d = min(d, 1 - d)
    return float(d) if not all(isinstance(x, (int, Fraction)) for x in (a, b)) else d


def flux_distance(f1, f2):
    """Max over components of the periodic distance."""
    if len(f1) != len(f2):
        raise GeometryError("flux vectors differ in length")
    return max((dist_per(a, b) for a, b in zip(f1.alphas, f2.alphas)), default=0.0)


def slope_c_k(fluxes, link_matrix, k):
    """c_k = sum_{k' != k} 2 pi alpha_{k'} link(k', k) (components indexed from 0)."""
    lm = np.asarray(link_matrix)
    n = len(fluxes)
    if lm.shape != (n, n):
        raise GeometryError("link matrix must be square with one row per component")
    if not np.issubdtype(lm.dtype, np.integer):
        if not np.all(lm == np.round(lm)):
            raise GeometryError("link matrix must be integer")
        lm = lm.astype(int)
    if np.any(np.diag(lm) != 0) or np.any(lm != lm.T):
        raise GeometryError("link matrix must be symmetric with zero diagonal")
    if not 0 <= k < n:
        raise IndexError(f"component index {k} out of range")
    alphas = fluxes.alphas if isinstance(fluxes, FluxVector) else tuple(fluxes)
    return float(sum(2.0 * math.pi * float(alphas[j]) * int(lm[j, k]) for j in range(n) if j != k))


def cut_lift(s, s_cross, length, tol=1e-12):
    """Arclength measured from the crossing point, in (0, length)."""
    lift = (np.asarray(s, dtype=float) - s_cross) % length
    if np.any(lift < tol) or np.any(length - lift < tol):
        raise GeometryError("point lies on the cut surface")
    return lift


def phase_jump_single(chart, alpha, crossing_sign, p, s_cross=0.0):
    """exp(-i b1 s/l) for a knot crossing the other surface once at s_cross.

    b1 = crossing_sign * 2 pi alpha; s is the tubular arclength of p measured
    from the crossing.  Across the cut the value jumps by exp(i b1).
    """
    from .tubular import tubular_coords

    if crossing_sign not in (1, -1):
        raise GeometryError("crossing_sign must be +1 or -1")
    s, _, _ = tubular_coords(chart, p)
    ell = chart.curve.length
    lift = cut_lift(s, s_cross, ell)
    b1 = crossing_sign * 2.0 * math.pi * float(alpha)
    return np.exp(-1j * b1 * lift / ell)
