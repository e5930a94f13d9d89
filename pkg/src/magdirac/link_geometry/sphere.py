"""Points of S^3 in C^2, stored as real 4-vectors (Re z0, Im z0, Re z1, Im z1).

Orientation: a tangent triple (a, b, c) at p is positive when det[p, a, b, c] > 0.
The left-invariant frame u1 = (-conj z1, conj z0), u2 = i u1, u3 = (i z0, i z1)
is positive, and stereographic projection from (0, 0, 0, 1) preserves this orientation.
"""

import numpy as np

TANGENT_TOL = 1e-10


class GeometryError(ValueError):
    pass


def to_real(z0, z1):
    z0 = np.asarray(z0, dtype=complex)
    z1 = np.asarray(z1, dtype=complex)
    return np.stack([z0.real, z0.imag, z1.real, z1.imag], axis=-1)


def to_complex(p):
    p = np.asarray(p, dtype=float)
    return p[..., 0] + 1j * p[..., 1], p[..., 2] + 1j * p[..., 3]


def dot(a, b):
    return np.sum(np.asarray(a) * np.asarray(b), axis=-1)


def hopf_frame(p):
    """Left-invariant orthonormal frame (u1, u2, u3) at p."""
    z0, z1 = to_complex(p)
    u1 = to_real(-np.conj(z1), np.conj(z0))
    u2 = to_real(-1j * np.conj(z1), 1j * np.conj(z0))
    u3 = to_real(1j * z0, 1j * z1)
    return u1, u2, u3


def cross(p, a, b):
    """Cross product in T_p S^3: the vector w with <w, c> = det[p, a, b, c]."""
    m = np.stack(np.broadcast_arrays(np.asarray(p, float), np.asarray(a, float), np.asarray(b, float)), axis=-2)
    # cofactor expansion along the missing fourth row
    out = np.empty(m.shape[:-2] + (4,))
    cols = [0, 1, 2, 3]
    for i in range(4):
        keep = [c for c in cols if c != i]
        out[..., i] = (-1) ** (i + 3) * np.linalg.det(m[..., :, keep])
    return out


def orientation(p, a, b, c):
    return np.linalg.det(np.stack(np.broadcast_arrays(p, a, b, c), axis=-2))


def exp_geodesic(p, v, t):
    """Point at distance t along the great circle through p with unit direction v."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(dot(p, p) - 1.0) > TANGENT_TOL):
        raise GeometryError("p must lie on the unit sphere")
    if np.any(np.abs(dot(p, v)) > TANGENT_TOL) or np.any(np.abs(dot(v, v) - 1.0) > TANGENT_TOL):
        raise GeometryError("v must be a unit vector tangent at p")
    t = np.asarray(t, dtype=float)[..., None]
    return np.cos(t) * p + np.sin(t) * v


def geodesic_distance(p, q):
    """Great-circle distance, computed stably as 2 asin(|p - q| / 2)."""
    return 2.0 * np.arcsin(np.clip(0.5 * np.linalg.norm(np.asarray(p) - np.asarray(q), axis=-1), 0.0, 1.0))


def stereographic(p):
    """(Re z0, Im z0, Re z1) / (1 - Im z1)."""
    p = np.asarray(p, dtype=float)
    return p[..., :3] / (1.0 - p[..., 3:4])


def stereographic_push(p, v):
    """Differential of the stereographic projection applied to v at p."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    den = 1.0 - p[..., 3:4]
    return v[..., :3] / den + p[..., :3] * v[..., 3:4] / den ** 2


def rotation_to_pole(q):
    """Orientation-preserving orthogonal matrix R with R q = (0, 0, 0, 1)."""
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q)
    e = np.array([0.0, 0.0, 0.0, 1.0])
    # Householder reflections: H_q maps q to e up to sign; compose two to get a rotation
    w = q - e
    if np.linalg.norm(w) < 1e-14:
        return np.eye(4)
    h1 = np.eye(4) - 2.0 * np.outer(w, w) / np.dot(w, w)
    # a second reflection fixing e restores det = +1
    h2 = np.diag([-1.0, 1.0, 1.0, 1.0])
    r = h2 @ h1
    assert np.allclose(r @ q, e) and np.linalg.det(r) > 0
    return r
