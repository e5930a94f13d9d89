"""Tubular coordinates (s, rho, theta) around a knot.

p = cos(rho) gamma(s) + sin(rho) (cos(theta) S(s) + sin(theta) N(s)).
"""

import math
from dataclasses import dataclass

import numpy as np

from .sphere import GeometryError, dot


def delta_bound(frame, epsilon):
    """eps * min(1, 1 / (|k| + sqrt(eps + |k|^2))) with |k| = sup sqrt(kg^2 + kn^2)."""
    k = frame.curvature_sup()
    return epsilon * min(1.0, 1.0 / (k + math.sqrt(epsilon + k * k)))


@dataclass(frozen=True)
class TubularChart:
    frame: object
    epsilon: float
    delta: float

    @property
    def curve(self):
        return self.frame.curve


def tubular_chart(frame, epsilon, delta=None):
    bound = delta_bound(frame, epsilon)
    if delta is None:
        delta = 0.99 * bound
    if not 0 < delta < epsilon or delta > bound:
        raise GeometryError(f"delta must lie in (0, {bound}]")
    return TubularChart(frame, float(epsilon), float(delta))


def coords_to_point(chart, s, rho, theta):
    d = chart.frame.at(np.asarray(s, dtype=float))
    rho = np.asarray(rho, dtype=float)[..., None]
    theta = np.asarray(theta, dtype=float)[..., None]
    return np.cos(rho) * d.pos + np.sin(rho) * (np.cos(theta) * d.S + np.sin(theta) * d.N)


def tubular_coords(chart, p, on_curve_tol=1e-12):
    """(s, rho, theta) of a point in the tube; inverse of ``coords_to_point``."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    curve = chart.curve
    # start from the nearest sample, then Newton on <p, gamma'(s)> = 0
    idx = np.argmax(p @ curve.samples.T, axis=1)
    s = curve.s[idx].astype(float)
    for _ in range(30):
        _, tan, acc = curve.jet(s)
        g = dot(p, tan)
        step = g / dot(p, acc)
        s = s - step
        if np.max(np.abs(step)) < 1e-15 * max(1.0, curve.length):
            break
    s = np.mod(s, curve.length)
    d = chart.frame.at(s)
    c = dot(p, d.pos)
    v = p - c[..., None] * d.pos
    sn = np.linalg.norm(v, axis=-1)
    rho = np.arctan2(sn, c)
    if np.any(rho < on_curve_tol):
        raise GeometryError("point lies on the knot; theta is undefined")
    if np.any(rho >= chart.epsilon):
        raise GeometryError("point lies outside the tube")
    theta = np.mod(np.arctan2(dot(v, d.N), dot(v, d.S)), 2.0 * math.pi)
    return s, rho, theta


def h_factor(chart, s, rho, theta, check=True):
    d = chart.frame.at(np.asarray(s, dtype=float))
    h = np.cos(rho) - np.sin(rho) * (d.kg * np.cos(theta) + d.kn * np.sin(theta))
    if check:
        inside = np.asarray(rho) < chart.delta
        if np.any(np.asarray(h)[inside] < 1.0 - chart.epsilon):
            raise GeometryError("h < 1 - epsilon inside the working radius")
    return h


def pushforwards(chart, s, rho, theta):
    """Images of d/ds, d/drho, d/dtheta in R^4.

    d/ds = h T + sin(rho) tr G, d/drho = -sin(rho) gamma + cos(rho) E,
    d/dtheta = sin(rho) G, with E = cos(theta) S + sin(theta) N and
    G = -sin(theta) S + cos(theta) N.
    """
    d = chart.frame.at(np.asarray(s, dtype=float))
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    h = np.cos(rho) - np.sin(rho) * (d.kg * np.cos(theta) + d.kn * np.sin(theta))
    c, sn = np.cos(theta)[..., None], np.sin(theta)[..., None]
    e = c * d.S + sn * d.N
    g = -sn * d.S + c * d.N
    sr = np.sin(rho)[..., None]
    ds = h[..., None] * d.T + sr * d.tr[..., None] * g
    drho = -sr * d.pos + np.cos(rho)[..., None] * e
    dtheta = sr * g
    return ds, drho, dtheta


def volume_factor(chart, s, rho, theta):
    """det[p, d/ds, d/drho, d/dtheta]; equals h sin(rho)."""
    p = coords_to_point(chart, s, rho, theta)
    ds, drho, dth = pushforwards(chart, s, rho, theta)
    return np.linalg.det(np.stack([p, ds, drho, dth], axis=-2))
