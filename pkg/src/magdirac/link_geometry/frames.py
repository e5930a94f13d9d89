"""Seifert (Darboux) frames along knots and their curvature coefficients.

With T the unit tangent and N the surface normal, S = N x T completes a
positively oriented frame, and

    D/ds (T, S, N) = [[0, kg, kn], [-kg, 0, tr], [-kn, -tr, 0]] (T, S, N).

Reversing N alone also reverses S, so kg and kn change sign while tr is kept.
"""

from dataclasses import dataclass

import numpy as np

from .sphere import GeometryError, cross, dot

ORTHO_TOL = 1e-10


def constant_normal(n):
    """Normal field of a totally geodesic cap: a fixed unit vector of R^4."""
    n = np.asarray(n, dtype=float)

    def field(s, pos, tan, acc):
        shape = np.shape(pos)
        return np.broadcast_to(n, shape).copy(), np.zeros(shape)

    return field


def projected_normal(x):
    """Unit normal obtained by projecting the constant vector x off span(gamma, T)."""
    x = np.asarray(x, dtype=float)

    def field(s, pos, tan, acc):
        xp = dot(x, pos)[..., None]
        xt = dot(x, tan)[..., None]
        xa = dot(x, acc)[..., None]
        raw = x - xp * pos - xt * tan
        draw = -xt * pos - xp * tan - xa * tan - xt * acc
        nrm = np.linalg.norm(raw, axis=-1)[..., None]
        if np.any(nrm < 1e-8):
            raise GeometryError("projected normal degenerates")
        n = raw / nrm
        return n, (draw - n * dot(n, draw)[..., None]) / nrm

    return field


def _covariant(pos, vec_dot):
    return vec_dot - dot(vec_dot, pos)[..., None] * pos


@dataclass(frozen=True)
class FrameData:
    pos: np.ndarray
    T: np.ndarray
    S: np.ndarray
    N: np.ndarray
    kg: np.ndarray
    kn: np.ndarray
    tr: np.ndarray
    DT: np.ndarray
    DS: np.ndarray
    DN: np.ndarray


class FrameField:
    """Frame (T, S, N) and coefficients kg, kn, tr along a KnotCurve.

    ``normal_field(s, pos, T, gamma'')`` returns (N, dN/ds).
    """

    def __init__(self, curve, normal_field):
        self.curve = curve
        self.normal_field = normal_field
        data = self.at(curve.s)
        self.T, self.S, self.N = data.T, data.S, data.N
        self.kg, self.kn, self.tr = data.kg, data.kn, data.tr

    def at(self, s):
        pos, tan, acc = self.curve.jet(s)
        n, dn = self.normal_field(s, pos, tan, acc)
        if (np.max(np.abs(dot(n, tan))) > ORTHO_TOL or np.max(np.abs(dot(n, pos))) > ORTHO_TOL
                or np.max(np.abs(dot(n, n) - 1.0)) > ORTHO_TOL):
            raise GeometryError("normal field must be a unit vector orthogonal to gamma and T")
        s_vec = cross(pos, n, tan)
        ds_vec = cross(pos, dn, tan) + cross(pos, n, acc)
        DT = _covariant(pos, acc)
        DS = _covariant(pos, ds_vec)
        DN = _covariant(pos, dn)
        return FrameData(pos, tan, s_vec, n, dot(DT, s_vec), dot(DT, n), dot(DS, n), DT, DS, DN)

    def curvature_sup(self):
        """sup_s sqrt(kg^2 + kn^2) over the samples."""
        return float(np.max(np.hypot(self.kg, self.kn)))


def seifert_frame(curve, normal_field):
    return FrameField(curve, normal_field)


def darboux_residual(frame, s=None):
    """Max deviation of the analytic frame derivative from the Darboux matrix product."""
    d = frame.at(frame.curve.s if s is None else s)
    kg, kn, tr = (x[..., None] for x in (d.kg, d.kn, d.tr))
    r1 = d.DT - (kg * d.S + kn * d.N)
    r2 = d.DS - (-kg * d.T + tr * d.N)
    r3 = d.DN - (-kn * d.T - tr * d.S)
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2)), np.max(np.abs(r3))))
