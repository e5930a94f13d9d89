"""Interval-valued distances between sampled oriented submanifolds of S^3.

The pointwise distance is
    |p1 - p2| + sum_k 2^-k min(||d^k N1(p1) - d^k N2(p2)||, 1),
where N is the Gauss map into the (4-d)-vectors.  Jets are stored as dense
tensors: an array of shape (n, m, 4, ..., 4) whose trailing k slots take
ambient vectors (which act through their tangential part).  The operator norm
of a jet difference is bracketed by test-vector contractions from below and by
the Frobenius norm from above.  Terms beyond K_max add at most 2^-K_max; the
upper end carries the more generous 2 * 2^-K_max.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .flux import dist_per
from .sphere import GeometryError, cross

_PAIRS = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def wedge(a, b):
    """Bivector a ^ b as its 6 Pluecker components."""
    return np.stack([a[..., i] * b[..., j] - a[..., j] * b[..., i] for i, j in _PAIRS], axis=-1)


@dataclass(frozen=True)
class SubmanifoldSample:
    d: int
    points: np.ndarray  # (n, 4)
    jets: tuple  # jets[k] has shape (n, m) + (4,) * k
    tangents: np.ndarray  # (n, d, 4) orthonormal tangent basis, used for test vectors
    measure: float

    @property
    def k_max(self):
        return len(self.jets) - 1


def curve_sample(curve, k_max=3):
    """Jets of the unit tangent (the Gauss map up to Hodge duality) along a KnotCurve."""
    t = curve.tangent(curve.s)
    n = len(t)
    omega = 2.0 * math.pi * np.fft.fftfreq(n, d=curve.length / n)
    spec = np.fft.fft(t, axis=0)
    jets = []
    for k in range(k_max + 1):
        tk = np.fft.ifft(spec * (1j * omega[:, None]) ** k, axis=0).real if k else t
        jet = tk
        for _ in range(k):
            jet = jet[..., None] * t.reshape(t.shape[:1] + (1,) * (jet.ndim - 1) + (4,))
        jets.append(jet)
    return SubmanifoldSample(1, curve.samples.copy(), tuple(jets), t[:, None, :], float(curve.length))


def cap_sample(center, e1, e2, radius, k_max=3, n_rings=24, n_phi=96):
    """Totally geodesic disc of geodesic radius ``radius`` about ``center``.

    The disc lies in the great 2-sphere spanned by center, e1, e2; its normal is
    the constant n with det[center, e1, e2, n] = 1.  Jets are Taylor terms of
    N = p ^ n in the exponential chart; only k_max <= 3 is supported.
    """
    if k_max > 3:
        raise GeometryError("cap jets are implemented up to order 3")
    c0, e1, e2 = (np.asarray(v, dtype=float) for v in (center, e1, e2))
    nrm = cross(c0, e1, e2)
    pts, b1, b2 = [c0], [e1], [e2]
    for i in range(1, n_rings + 1):
        r = radius * i / n_rings
        m = max(6, int(round(n_phi * i / n_rings)))
        phi = 2.0 * math.pi * np.arange(m) / m
        dirs = np.cos(phi)[:, None] * e1 + np.sin(phi)[:, None] * e2
        perp = -np.sin(phi)[:, None] * e1 + np.cos(phi)[:, None] * e2
        pts.extend(math.cos(r) * c0 + math.sin(r) * dirs)
        b1.extend(-math.sin(r) * c0 + math.cos(r) * dirs)
        b2.extend(perp)
    p = np.array(pts)
    u = np.array(b1)
    v = np.array(b2)
    proj = u[:, :, None] * u[:, None, :] + v[:, :, None] * v[:, None, :]  # (n, 4, 4)
    pn = wedge(p, np.broadcast_to(nrm, p.shape))
    jets = [pn]
    if k_max >= 1:
        jets.append(np.stack([wedge(proj[:, :, i], np.broadcast_to(nrm, p.shape)) for i in range(4)], axis=-1))
    if k_max >= 2:
        jets.append(-pn[:, :, None, None] * proj[:, None, :, :])
    if k_max >= 3:
        pw = jets[1]  # (n, 6, 4): P e_i ^ n
        j3 = -(proj[:, None, :, :, None] * pw[:, :, None, None, :]
               + proj[:, None, :, None, :] * pw[:, :, None, :, None]
               + proj[:, None, None, :, :] * pw[:, :, :, None, None]) / 3.0
        jets.append(j3)
    area = 2.0 * math.pi * (1.0 - math.cos(radius))
    return SubmanifoldSample(2, p, tuple(jets), np.stack([u, v], axis=1), area)




def _contract(jet, vec, k):
    """Feed the same vector into all k trailing slots."""
    out = jet
    for _ in range(k):
        out = np.sum(out * vec.reshape(vec.shape[:1] + (1,) * (out.ndim - 2) + (4,)), axis=-1)
    return out


def _pair_terms(m1, i, m2, idx, k_max):
    """Lower and upper bounds of sum_k 2^-k min(||Delta_k||, 1) for p1 = m1[i] against m2[idx]."""
    lo = np.zeros(len(idx))
    hi = np.zeros(len(idx))
    t1 = np.broadcast_to(m1.tangents[i], (len(idx),) + m1.tangents[i].shape)
    tests = np.concatenate([t1, m2.tangents[idx]], axis=1)  # (c, d1 + d2, 4)
    sums = []
    nt = tests.shape[1]
    for a in range(nt):
        for b in range(a + 1, nt):
            for sgn in (1.0, -1.0):
                w = tests[:, a] + sgn * tests[:, b]
                nw = np.linalg.norm(w, axis=-1, keepdims=True)
                sums.append(np.where(nw > 1e-12, w / np.maximum(nw, 1e-300), tests[:, a]))
    tests = np.concatenate([tests, np.stack(sums, axis=1)], axis=1) if sums else tests
    for k in range(k_max + 1):
        j1 = m1.jets[k][i][None]
        j2 = m2.jets[k][idx]
        diff = j1 - j2
        frob = np.sqrt(np.sum(diff.reshape(len(idx), -1) ** 2, axis=1))
        if k == 0:
            low = frob
        else:
            low = np.zeros(len(idx))
            for t in range(tests.shape[1]):
                val = _contract(diff, tests[:, t], k)
                low = np.maximum(low, np.linalg.norm(val, axis=-1))
        lo += 2.0 ** -k * np.minimum(low, 1.0)
        hi += 2.0 ** -k * np.minimum(frob, 1.0)
    return lo, hi


def _directed(m1, m2, k_max):
    """Interval for sup_{p1} inf_{p2} delta(p1, p2) over the samples."""
    tree = cKDTree(m2.points)
    sup_lo = sup_hi = 0.0
    _, nn = tree.query(m1.points)
    for i, p in enumerate(m1.points):
        lo, hi = _pair_terms(m1, i, m2, np.array([nn[i]]), k_max)
        bound = np.linalg.norm(p - m2.points[nn[i]]) + hi[0]
        idx = np.array(tree.query_ball_point(p, bound + 1e-12), dtype=int)
        lo, hi = _pair_terms(m1, i, m2, idx, k_max)
        dist = np.linalg.norm(m2.points[idx] - p, axis=1)
        sup_lo = max(sup_lo, float(np.min(dist + lo)))
        sup_hi = max(sup_hi, float(np.min(dist + hi)))
    return sup_lo, sup_hi


def dist_submanifold(m1, m2, k_max=None):
    """(lower, upper) for the submanifold distance over the sampled points."""
    if m1.d != m2.d:
        raise GeometryError("submanifolds have different dimensions")
    k = min(m1.k_max, m2.k_max) if k_max is None else int(k_max)
    if k > min(m1.k_max, m2.k_max):
        raise GeometryError("jets are not available to the requested order")
    a = _directed(m1, m2, k)
    b = _directed(m2, m1, k)
    dh = abs(m1.measure - m2.measure)
    return dh + max(a[0], b[0]), dh + max(a[1], b[1]) + 2.0 * 2.0 ** -k


@dataclass(frozen=True)
class LinkConfiguration:
    """Seifert surfaces (surface sample, boundary sample) with their fluxes."""
    components: tuple
    fluxes: tuple


def dist_surface(s1, s2, k_max=None):
    """dist_2 of the surfaces plus dist_1 of their boundaries."""
    a = dist_submanifold(s1[0], s2[0], k_max)
    b = dist_submanifold(s1[1], s2[1], k_max)
    return a[0] + b[0], a[1] + b[1]


def dist_config(cfg1, cfg2, k_max=None):
    """max over components of dist_S + periodic flux distance, as an interval."""
    if len(cfg1.components) != len(cfg2.components) or len(cfg1.fluxes) != len(cfg2.fluxes):
        raise GeometryError("configurations have different numbers of components")
    lo = hi = 0.0
    for s1, s2, a1, a2 in zip(cfg1.components, cfg2.components, cfg1.fluxes, cfg2.fluxes):
        dlo, dhi = dist_surface(s1, s2, k_max)
        fd = float(dist_per(a1, a2))
        lo = max(lo, dlo + fd)
        hi = max(hi, dhi + fd)
    return lo, hi
