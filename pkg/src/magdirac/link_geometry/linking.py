"""Linking numbers from the Gauss integral after stereographic projection."""

import math

import numpy as np

from .sphere import GeometryError, rotation_to_pole, stereographic, stereographic_push

ROUND_TOL = 0.05


def _pole(c1, c2, n_candidates=512, seed=0):
    rng = np.random.default_rng(seed)
    cand = rng.normal(size=(n_candidates, 4))
    cand /= np.linalg.norm(cand, axis=1, keepdims=True)
    pts = np.vstack([c1, c2])
    # maximize the distance to the nearer curve, i.e. minimize the largest overlap
    score = np.max(cand @ pts.T, axis=1)
    return cand[np.argmin(score)]


def _resample(curve, n):
    s = np.arange(n) * curve.length / n
    pos, tan, _ = curve.jet(s)
    return pos, tan


def gauss_linking_integral(curve1, curve2, pole=None, n=512, chunk=256):
    """Gauss double integral of the projected curves (trapezoid rule, n nodes each).

    The integrand is smooth and periodic, so the rule converges geometrically
    as long as the curves stay apart relative to the node spacing.
    """
    p1, t1 = _resample(curve1, n)
    p2, t2 = _resample(curve2, n)
    if pole is None:
        pole = _pole(p1, p2)
    if np.max(np.vstack([p1, p2]) @ pole) > 1.0 - 1e-6:
        raise GeometryError("projection pole too close to a curve")
    rot = rotation_to_pole(pole)
    p1, t1, p2, t2 = (x @ rot.T for x in (p1, t1, p2, t2))
    x1 = stereographic(p1)
    x2 = stereographic(p2)
    w1 = stereographic_push(p1, t1) * (curve1.length / len(p1))
    w2 = stereographic_push(p2, t2) * (curve2.length / len(p2))
    total = 0.0
    for i in range(0, len(x1), chunk):
        d = x1[i:i + chunk, None, :] - x2[None, :, :]
        cr = np.cross(w1[i:i + chunk, None, :], w2[None, :, :])
        dist = np.linalg.norm(d, axis=-1)
        if np.min(dist) < 1e-12:
            raise GeometryError("curves intersect")
        total += np.sum(np.sum(d * cr, axis=-1) / dist ** 3)
    return total / (4.0 * math.pi)


def linking_number(curve1, curve2, n=512):
    """Integer linking number; raises when the Gauss integral is not near an integer."""
    val = gauss_linking_integral(curve1, curve2, n=n)
    n = round(val)
    if abs(val - n) > ROUND_TOL:
        raise GeometryError(f"Gauss integral {val:.6f} is not within {ROUND_TOL} of an integer; "
                            "increase the sampling")
    return int(n)
