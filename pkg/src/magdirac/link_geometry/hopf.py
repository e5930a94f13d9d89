"""Hopf map S^3 -> S^2 and its fibres."""

import math

import numpy as np

from .curves import KnotCurve, RawCurve
from .sphere import GeometryError


def hopf_map(z0, z1):
    z0 = complex(z0)
    z1 = complex(z1)
    if abs(abs(z0) ** 2 + abs(z1) ** 2 - 1.0) > 1e-10:
        raise GeometryError("Hopf map needs |z0|^2 + |z1|^2 = 1")
    w = 2.0 * z0 * z1.conjugate()
    return np.array([abs(z0) ** 2 - abs(z1) ** 2, w.real, w.imag])


def hopf_map_real(p):
    p = np.asarray(p, dtype=float)
    z0 = p[..., 0] + 1j * p[..., 1]
    z1 = p[..., 2] + 1j * p[..., 3]
    w = 2.0 * z0 * np.conj(z1)
    return np.stack([np.abs(z0) ** 2 - np.abs(z1) ** 2, w.real, w.imag], axis=-1)


def fibre_point(v):
    """A point (z0, z1) with Hopf image v."""
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise GeometryError("v must be a unit vector")
    theta = math.acos(max(-1.0, min(1.0, v[0])))
    phi = math.atan2(v[2], v[1])
    return math.cos(theta / 2), math.sin(theta / 2) * complex(math.cos(phi), -math.sin(phi))


def hopf_preimage(v, n_samples=2048):
    """Fibre over v, t -> e^{it}(z0, z1), oriented along u3 = (i z0, i z1)."""
    z0, z1 = fibre_point(v)
    a = np.array([z0.real, z0.imag, z1.real, z1.imag])
    b = np.array([-z0.imag, z0.real, -z1.imag, z1.real])  # i (z0, z1)

    def func(t):
        c = np.cos(t)[..., None]
        s = np.sin(t)[..., None]
        return c * a + s * b, -s * a + c * b, -c * a - s * b

    return KnotCurve(RawCurve(func), n_samples)
