"""Real-order modified Bessel functions and the weighted integrals C_alpha.

Orders are restricted to ``0 < nu < 2`` on the public surface.  Evaluation is
split at ``x = 2``: ascending series below, integral representations above.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

CROSSOVER = 2.0

# K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt; the integrand is even in t,
# so the trapezoid rule on a uniform grid converges geometrically.
_TRAP_STEP = 0.05
# Gauss-Legendre rule for the bounded piece of the I_nu integral.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)


class DomainError(ValueError):
    """Argument outside the supported domain of a special function."""


def gamma(x):
    """Gamma function for ``x > 0`` (stdlib ``math.gamma``, ~1 ulp accurate)."""
    x = float(x)
    if not x > 0 or not math.isfinite(x):
        raise DomainError(f"gamma requires x > 0, got {x!r}")
    return math.gamma(x)


def _rgamma(x):
    """1/Gamma(x), zero at the poles."""
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def _check(nu, x):
    if not 0.0 < nu < 2.0:
        raise DomainError(f"order must satisfy 0 < nu < 2, got {nu!r}")
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainError("argument must be finite and > 0")
    return arr


def _i_series(nu, x):
    """Ascending series for I_nu(x); valid for any real nu (poles give 0)."""
    half = 0.5 * x
    q = half * half
    term = np.power(half, nu) * _rgamma(nu + 1.0)
    if nu < 0 and nu == math.floor(nu):
        # I_{-n} = I_n for integer n
        return _i_series(-nu, x)
    total = np.array(term, dtype=float, copy=True)
    k = 0
    if nu + 1.0 <= 0:
        # leading coefficients of 1/Gamma(k + nu + 1) need restarting past the poles
        total = np.zeros_like(half)
        for k in range(60):
            c = _rgamma(k + nu + 1.0) / math.factorial(k)
            total = total + c * np.power(half, 2 * k + nu)
        return total
    while True:
        k += 1
        term = term * q / (k * (k + nu))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or k > 400:
            return total


def _k_integral_scaled(nu, x):
    """exp(x) K_nu(x) by trapezoid quadrature of the cosh representation."""
    x = np.atleast_1d(x)
    if x.size == 0:
        return x.copy()
    # stop where the integrand has dropped below 1e-18 of its peak
    tmax = math.acosh(1.0 + (42.0 + abs(nu) * 40.0) / float(np.min(x))) + 1.0
    t = np.arange(int(tmax / _TRAP_STEP) + 2) * _TRAP_STEP
    f = np.exp(-np.multiply.outer(x, np.cosh(t) - 1.0)) * np.cosh(nu * t)
    return _TRAP_STEP * (np.sum(f, axis=-1) - 0.5 * f[..., 0])


def _i_integral_scaled(nu, x):
    """exp(-x) I_nu(x) from the two-piece integral representation."""
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    for idx, xv in np.ndenumerate(x):
        # the bounded piece peaks at t = 0 with width ~ 1/sqrt(x): split there
        w = min(math.pi, 12.0 / math.sqrt(xv))
        acc = 0.0
        for lo, hi in ((0.0, w), (w, math.pi)):
            if hi <= lo:
                continue
            t = 0.5 * (hi - lo) * _GL_NODES + 0.5 * (hi + lo)
            acc += 0.5 * (hi - lo) * np.sum(_GL_WEIGHTS * np.exp(xv * (np.cos(t) - 1.0)) * np.cos(nu * t))
        acc /= math.pi
        s = math.sin(nu * math.pi)
        if s != 0.0:
            tmax = math.acosh(1.0 + 45.0 / xv) + 1.0
            t = 0.5 * tmax * _GL_NODES + 0.5 * tmax
            tail = 0.5 * tmax * np.sum(_GL_WEIGHTS * np.exp(-xv * (np.cosh(t) + 1.0) - nu * t))
            acc -= s / math.pi * tail
        out[idx] = acc
    return out


def _near_integer(nu, tol=1e-3):
    return abs(nu - round(nu)) < tol


def _kv(nu, x):
    """K_nu for any real order (K_{-nu} = K_nu), no range check."""
    nu = abs(nu)
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= CROSSOVER
    if np.any(small):
        xs = x[small]
        if _near_integer(nu):
            out[small] = _k_integral_scaled(nu, xs) * np.exp(-xs)
        else:
            diff = _i_series(-nu, xs) - _i_series(nu, xs)
            out[small] = 0.5 * math.pi * diff / math.sin(nu * math.pi)
    if np.any(~small):
        xl = x[~small]
        out[~small] = _k_integral_scaled(nu, xl) * np.exp(-xl)
    return out


def _iv(nu, x):
    """I_nu for real order, no range check."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= CROSSOVER
    if np.any(small):
        out[small] = _i_series(nu, x[small])
    if np.any(~small):
        xl = x[~small]
        if nu < 0 and not _near_integer(nu, 0.0):
            # I_{-nu} = I_nu + (2/pi) sin(nu pi) K_nu
            mu = -nu
            out[~small] = (_i_integral_scaled(mu, xl) * np.exp(xl)
                           + 2.0 / math.pi * math.sin(mu * math.pi) * _kv(mu, xl))
        else:
            out[~small] = _i_integral_scaled(abs(nu), xl) * np.exp(xl)
    return out


def _scalar_or_array(x, value):
    return float(value) if np.ndim(x) == 0 else value


def bessel_k(nu, x):
    """Modified Bessel function of the second kind K_nu(x), 0 < nu < 2, x > 0."""
    arr = _check(nu, x)
    return _scalar_or_array(x, _kv(nu, arr.reshape(-1)).reshape(arr.shape))


def bessel_i(nu, x):
    """Modified Bessel function of the first kind I_nu(x), 0 < nu < 2, x > 0."""
    arr = _check(nu, x)
    return _scalar_or_array(x, _iv(nu, arr.reshape(-1)).reshape(arr.shape))


def bessel_k_scaled(nu, x):
    """exp(x) K_nu(x); avoids underflow for large arguments."""
    arr = _check(nu, x).reshape(-1)
    out = np.empty_like(arr)
    small = arr <= CROSSOVER
    out[small] = _kv(nu, arr[small]) * np.exp(arr[small])
    out[~small] = _k_integral_scaled(nu, arr[~small])
    return _scalar_or_array(x, out.reshape(np.shape(x)))


def bessel_k_derivative(nu, x):
    """d/dx K_nu(x) = -(K_{nu-1}(x) + K_{nu+1}(x)) / 2."""
    arr = _check(nu, x)
    flat = arr.reshape(-1)
    val = -0.5 * (_kv(nu - 1.0, flat) + _kv(nu + 1.0, flat))
    return _scalar_or_array(x, val.reshape(arr.shape))


def bessel_k_second_derivative(nu, x):
    """d^2/dx^2 K_nu(x) by applying the derivative recurrence twice."""
    arr = _check(nu, x)
    flat = arr.reshape(-1)
    val = 0.25 * (_kv(nu - 2.0, flat) + 2.0 * _kv(nu, flat) + _kv(nu + 2.0, flat))
    return _scalar_or_array(x, val.reshape(arr.shape))


def bessel_i_derivative(nu, x):
    """d/dx I_nu(x) = (I_{nu-1}(x) + I_{nu+1}(x)) / 2."""
    arr = _check(nu, x)
    flat = arr.reshape(-1)
    val = 0.5 * (_iv(nu - 1.0, flat) + _iv(nu + 1.0, flat))
    return _scalar_or_array(x, val.reshape(arr.shape))


def k_radial_derivative(nu, kappa, r):
    """d/dr K_nu(kappa r) through the recurrence, for the model-operator profiles."""
    return kappa * bessel_k_derivative(nu, kappa * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class CAlphaValue:
    alpha: float
    value: float
    abserr: float


def _c_alpha_unit_disc(alpha, terms=24):
    """int_0^1 K_alpha(r)^2 r dr, integrating the squared ascending series termwise."""
    pref = 0.5 * math.pi / math.sin(math.pi * alpha)
    # K_alpha(r) = pref * sum_k (a_k r^(2k - alpha) - b_k r^(2k + alpha))
    coef, powr = [], []
    for k in range(terms):
        fk = math.factorial(k)
        coef.append(pref * 0.5 ** (2 * k - alpha) * _rgamma(k - alpha + 1.0) / fk)
        powr.append(2 * k - alpha)
        coef.append(-pref * 0.5 ** (2 * k + alpha) * _rgamma(k + alpha + 1.0) / fk)
        powr.append(2 * k + alpha)
    coef = np.array(coef)
    powr = np.array(powr)
    expo = powr[:, None] + powr[None, :] + 2.0
    return float(np.sum(np.outer(coef, coef) / expo))


def c_alpha(alpha):
    """C_alpha = int_0^inf K_alpha(r)^2 r dr.

    On (0, 1) the squared series is integrated exactly term by term, which
    handles the r^(1 - 2 alpha) endpoint singularity; (1, inf) uses adaptive
    quadrature.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"c_alpha requires 0 < alpha < 1, got {alpha!r}")

    def outer(r):
        return float(_kv(alpha, np.array([r]))[0]) ** 2 * r

    v1 = _c_alpha_unit_disc(alpha)
    v2, e2 = integrate.quad(outer, 1.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400)
    return CAlphaValue(alpha=alpha, value=v1 + v2, abserr=e2 + 1e-14 * abs(v1))


def c_alpha_closed_form(alpha):
    """Candidate closed form pi alpha / (2 sin(pi alpha)); checked against ``c_alpha``."""
    return math.pi * alpha / (2.0 * math.sin(math.pi * alpha))
