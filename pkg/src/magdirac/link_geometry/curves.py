"""Closed curves on S^3 with analytic derivatives and arclength parametrization."""

import math
from dataclasses import dataclass

import numpy as np

from .sphere import GeometryError, dot

DEFAULT_SAMPLES = 2048


@dataclass(frozen=True)
class RawCurve:
    """Closed curve t -> gamma(t), t in [0, period).

    ``func(t)`` returns (position, first derivative, second derivative) as arrays
    of shape t.shape + (4,).
    """
    func: object
    period: float = 2.0 * math.pi

    def __call__(self, t):
        return self.func(np.asarray(t, dtype=float))


class KnotCurve:
    """Unit-speed closed curve on S^3.

    Positions and the first two arclength derivatives are evaluated exactly at
    any s through Newton inversion of the arclength function, which is kept as a
    Fourier series of the speed.
    """

    def __init__(self, raw, n_samples=DEFAULT_SAMPLES, n_fourier=None):
        self.raw = raw
        m = n_fourier or max(4 * n_samples, 1024)
        t = np.arange(m) * raw.period / m
        pos, d1, _ = raw(t)
        if np.any(np.abs(dot(pos, pos) - 1.0) > 1e-12):
            raise GeometryError("curve leaves the unit sphere")
        speed = np.linalg.norm(d1, axis=-1)
        if np.min(speed) < 1e-10 * max(np.max(speed), 1e-300):
            raise GeometryError("degenerate parametrization: speed vanishes")
        coef = np.fft.rfft(speed) / m
        self._period = raw.period
        self._mean = coef[0].real
        self._coef = coef[1:]
        self._freq = 2.0 * math.pi * np.arange(1, len(coef)) / raw.period
        if m % 2 == 0:
            self._coef = self._coef.copy()
            self._coef[-1] *= 0.5
        # drop modes below roundoff; constant-speed curves keep none
        big = np.nonzero(np.abs(self._coef) > 1e-15 * self._mean)[0]
        keep = big[-1] + 1 if len(big) else 0
        self._coef = self._coef[:keep]
        self._freq = self._freq[:keep]
        self.length = float(self._mean * raw.period)
        self.n_samples = n_samples
        self.s = np.arange(n_samples) * self.length / n_samples
        self.t = self.param(self.s)
        self.samples = self.position(self.s)
        self.base_point = 0

    def _arclength(self, t):
        t = np.asarray(t, dtype=float)
        ph = np.multiply.outer(t, self._freq)
        # integral of the oscillating modes from 0 to t
        osc = np.sum(2.0 * (self._coef * (np.exp(1j * ph) - 1.0) / (1j * self._freq)).real, axis=-1)
        return self._mean * t + osc

    def param(self, s):
        """Raw parameter t(s)."""
        s = np.asarray(s, dtype=float)
        s_mod = np.mod(s, self.length)
        t = s_mod / self._mean
        for _ in range(50):
            _, d1, _ = self.raw(t)
            step = (self._arclength(t) - s_mod) / np.linalg.norm(d1, axis=-1)
            t = t - step
            if np.max(np.abs(step), initial=0.0) < 1e-15 * self._period:
                break
        return t

    def _derivs(self, s):
        t = self.param(s)
        pos, d1, d2 = self.raw(t)
        sp = np.linalg.norm(d1, axis=-1)[..., None]
        sp_dot = dot(d1, d2)[..., None] / sp
        return pos, d1 / sp, (d2 - d1 * sp_dot / sp) / sp ** 2

    def position(self, s):
        return self._derivs(s)[0]

    def tangent(self, s):
        return self._derivs(s)[1]

    def acceleration(self, s):
        return self._derivs(s)[2]

    def jet(self, s):
        """(gamma, gamma', gamma'') in arclength."""
        return self._derivs(s)

    def reversed(self):
        raw = self.raw
        per = raw.period

        def func(t):
            p, d1, d2 = raw(per - t)
            return p, -d1, d2

        return KnotCurve(RawCurve(func, per), self.n_samples)


def arclength_reparametrize(raw, n_samples=DEFAULT_SAMPLES):
    """Unit-speed version of a closed curve; orientation is preserved."""
    return KnotCurve(raw, n_samples)


def great_circle(p, v):
    """t -> cos t p + sin t v for orthonormal p, v."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if abs(np.dot(p, v)) > 1e-12 or abs(np.dot(p, p) - 1) > 1e-12 or abs(np.dot(v, v) - 1) > 1e-12:
        raise GeometryError("great circle needs orthonormal p, v")

    def func(t):
        c = np.cos(t)[..., None]
        s = np.sin(t)[..., None]
        return c * p + s * v, -s * p + c * v, -c * p - s * v

    return RawCurve(func)


def round_circle(center, e1, e2, radius):
    """Circle of geodesic radius ``radius`` around ``center`` in the great 2-sphere
    spanned by center, e1, e2 (orthonormal)."""
    c0 = np.asarray(center, dtype=float)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    a, b = math.sin(radius), math.cos(radius)

    def func(t):
        c = np.cos(t)[..., None]
        s = np.sin(t)[..., None]
        return b * c0 + a * (c * e1 + s * e2), a * (-s * e1 + c * e2), -a * (c * e1 + s * e2)

    return RawCurve(func)


def torus_knot(p, q, r0=math.pi / 4):
    """(p, q) torus knot on the Clifford-type torus |z0| = cos r0, |z1| = sin r0."""
    a, b = math.cos(r0), math.sin(r0)

    def func(t):
        e0 = np.exp(1j * p * t)
        e1 = np.exp(1j * q * t)
        pos = np.stack([a * e0.real, a * e0.imag, b * e1.real, b * e1.imag], axis=-1)
        d1 = np.stack([-a * p * e0.imag, a * p * e0.real, -b * q * e1.imag, b * q * e1.real], axis=-1)
        d2 = np.stack([-a * p * p * e0.real, -a * p * p * e0.imag, -b * q * q * e1.real, -b * q * q * e1.imag], axis=-1)
        return pos, d1, d2

    return RawCurve(func)


def perturbed(raw, amplitude, mode=3, direction=None):
    """Smooth normal-ish perturbation renormalized to the sphere."""
    d = np.array([0.3, -0.5, 0.7, 0.4]) if direction is None else np.asarray(direction, float)

    def func(t):
        p, d1, d2 = raw(t)
        w = np.sin(mode * t)[..., None]
        wd = mode * np.cos(mode * t)[..., None]
        wdd = -mode * mode * np.sin(mode * t)[..., None]
        x = p + amplitude * w * d
        x1 = d1 + amplitude * wd * d
        x2 = d2 + amplitude * wdd * d
        n = np.linalg.norm(x, axis=-1)[..., None]
        n1 = dot(x, x1)[..., None] / n
        n2 = (dot(x1, x1) + dot(x, x2))[..., None] / n - n1 ** 2 / n
        y = x / n
        y1 = x1 / n - x * n1 / n ** 2
        y2 = x2 / n - 2 * x1 * n1 / n ** 2 - x * n2 / n ** 2 + 2 * x * n1 ** 2 / n ** 3
        return y, y1, y2

    return RawCurve(func, raw.period)
