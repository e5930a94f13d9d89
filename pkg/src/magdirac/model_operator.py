"""Flat model operator on T_l x R^2 with an Aharonov-Bohm flux alpha along the axis.

Coordinates are (s, r, theta) with s periodic of length ``ell``.  In the radial
gauge A = alpha d(theta) the operator reads

    D = -i sigma_3 d_s + [[0, -i e^{-i theta}(d_r + (-i d_theta + alpha)/r)],
                          [-i e^{i theta}(d_r - (-i d_theta + alpha)/r), 0]].

Spinors are stored mode by mode: the pair (n, m) carries
e^{i j s}(u(r) e^{i m theta}, d(r) e^{i (m+1) theta}) / sqrt(2 pi ell) with
j = 2 pi n / ell, a pair that D maps to itself.  Singular modes live in m = -1.
Radial derivatives of Bessel profiles always come from recurrences.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .special_functions import _kv, c_alpha

DEFAULT_NMAX = 32


class ModelError(ValueError):
    pass


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise ModelError(f"alpha must lie strictly inside (0, 1), got {alpha!r}")


def jbracket(j):
    return np.sqrt(1.0 + np.square(j))


@dataclass(frozen=True)
class RadialGrid:
    """Log-spaced radial grid; integrals use Simpson's rule in log r."""
    r_min: float = 1e-10
    r_max: float = 40.0
    n: int = 4096

    @property
    def r(self):
        return np.geomspace(self.r_min, self.r_max, self.n)

    def integrate(self, values):
        """int_0^r_max values(r) r dr.

        The piece below r_min is added by fitting c r^p to the first two
        samples of values * r^2, i.e. the integrand in log r.
        """
        r = self.r
        y = np.log(r)
        g = np.asarray(values, dtype=float) * r * r
        total = simpson(g, x=y)
        if g[0] > 0 and g[1] > 0:
            p = (math.log(g[1]) - math.log(g[0])) / (y[1] - y[0])
            if p > 0:
                total += g[0] / p
        return float(total)


def _ksafe(nu, x):
    return _kv(nu, np.asarray(x, dtype=float))


def _kprime(nu, x):
    x = np.asarray(x, dtype=float)
    return -0.5 * (_kv(nu - 1.0, x) + _kv(nu + 1.0, x))


@dataclass
class ModeGridFunction:
    """Spinor on T_l x R^2 stored as radial profiles per (n, m)."""
    grid: RadialGrid
    ell: float
    alpha: float
    comps: dict = field(default_factory=dict)  # (n, m) -> [u, d, du, dd]

    def j(self, n):
        return 2.0 * math.pi * n / self.ell

    def add(self, key, u, d, du=None, dd=None):
        zero = np.zeros(self.grid.n, dtype=complex)
        if key in self.comps:
            cur = self.comps[key]
            parts = [u, d, du, dd]
            for i in range(4):
                if parts[i] is None or cur[i] is None:
                    cur[i] = None if parts[i] is None and i >= 2 else (cur[i] if parts[i] is None else parts[i] if cur[i] is None else cur[i] + parts[i])
                else:
                    cur[i] = cur[i] + parts[i]
        else:
            self.comps[key] = [np.asarray(u if u is not None else zero, dtype=complex),
                               np.asarray(d if d is not None else zero, dtype=complex),
                               None if du is None else np.asarray(du, dtype=complex),
                               None if dd is None else np.asarray(dd, dtype=complex)]
        return self

    def __add__(self, other):
        out = ModeGridFunction(self.grid, self.ell, self.alpha, {})
        for src in (self, other):
            for key, (u, d, du, dd) in src.comps.items():
                out.add(key, u, d, du, dd)
        return out

    def norm2(self):
        return sum(self.grid.integrate(np.abs(u) ** 2 + np.abs(d) ** 2)
                   for u, d, _, _ in self.comps.values())

    def inner(self, other):
        """<self, other> in L^2 (antilinear in the first slot)."""
        tot = 0.0 + 0.0j
        for key, (u, d, _, _) in self.comps.items():
            if key not in other.comps:
                continue
            u2, d2, _, _ = other.comps[key]
            re = np.conj(u) * u2 + np.conj(d) * d2
            tot += self.grid.integrate(re.real) + 1j * self.grid.integrate(re.imag)
        return tot

    def evaluate(self, s, r_index, theta):
        """Pointwise values (up, down) at grid radius index ``r_index``."""
        up = 0j
        down = 0j
        pref = 1.0 / math.sqrt(2.0 * math.pi * self.ell)
        for (n, m), (u, d, _, _) in self.comps.items():
            ph = np.exp(1j * self.j(n) * s)
            up = up + pref * ph * u[r_index] * np.exp(1j * m * theta)
            down = down + pref * ph * d[r_index] * np.exp(1j * (m + 1) * theta)
        return up, down


def _parts(f, key):
    n, m = key
    u, d, du, dd = f.comps[key]
    if du is None or dd is None:
        raise ModelError("radial derivatives are required to apply the operator")
    r = f.grid.r
    j = f.j(n)
    a = f.alpha
    # transverse part: up <- -i(d' + (m+1+alpha) d / r), down <- -i(u' - (m+alpha) u / r)
    t_up = -1j * (dd + (m + 1 + a) * d / r)
    t_dn = -1j * (du - (m + a) * u / r)
    return j, u, d, t_up, t_dn


def apply_dirac(f):
    """D f with the s and theta derivatives taken exactly and the radial ones from f."""
    out = ModeGridFunction(f.grid, f.ell, f.alpha, {})
    for key in f.comps:
        j, u, d, t_up, t_dn = _parts(f, key)
        out.add(key, j * u + t_up, -j * d + t_dn)
    return out


def _coeffs(seq, nmax=DEFAULT_NMAX):
    if isinstance(seq, dict):
        items = {int(k): complex(v) for k, v in seq.items() if v != 0}
    else:
        raise ModelError("coefficient sequences are mappings n -> value")
    if any(abs(k) > nmax for k in items):
        raise ModelError(f"Fourier index beyond truncation |n| <= {nmax}")
    return dict(sorted(items.items()))


@dataclass(frozen=True)
class DeficiencyElement:
    """Solution of (D_max -+ i) f = 0 built from K_{1-alpha} and K_alpha."""
    ell: float
    alpha: float
    c_seq: dict
    sign: int  # +1 for the +i space, -1 for the -i space

    def j(self, n):
        return 2.0 * math.pi * n / self.ell

    def down_factor(self, n):
        j = self.j(n)
        return (self.sign + 1j * j) / math.sqrt(1.0 + j * j)

    def evaluate(self, s, r, theta):
        """Pointwise (up, down) spinor values."""
        s, r, theta = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (s, r, theta)))
        up = np.zeros(s.shape, dtype=complex)
        down = np.zeros(s.shape, dtype=complex)
        pref = 1.0 / math.sqrt(2.0 * math.pi * self.ell)
        flat_r = r.reshape(-1)
        for n, c in self.c_seq.items():
            j = self.j(n)
            jb = math.sqrt(1.0 + j * j)
            ph = np.exp(1j * j * s)
            k1 = _ksafe(1.0 - self.alpha, flat_r * jb).reshape(r.shape)
            k0 = _ksafe(self.alpha, flat_r * jb).reshape(r.shape)
            up += pref * c * ph * k1 * np.exp(-1j * theta)
            down += pref * c * self.down_factor(n) * ph * k0
        return up, down

    def on_grid(self, grid=None):
        grid = grid or RadialGrid()
        r = grid.r
        f = ModeGridFunction(grid, self.ell, self.alpha, {})
        a = self.alpha
        for n, c in self.c_seq.items():
            jb = math.sqrt(1.0 + self.j(n) ** 2)
            x = r * jb
            beta = self.down_factor(n)
            f.add((n, -1), c * _ksafe(1 - a, x), c * beta * _ksafe(a, x),
                  c * jb * _kprime(1 - a, x), c * beta * jb * _kprime(a, x))
        return f


def deficiency_element(ell, alpha, c_seq, sign, nmax=DEFAULT_NMAX):
    """Element of ker(D_max - sign i) with coefficients c_n, j = 2 pi n / ell.

    Spin up carries c_n K_{1-alpha}(r<j>) e^{-i theta}; spin down carries
    ((sign + i j)/<j>) c_n K_alpha(r<j>); both with e^{ijs}/sqrt(2 pi ell).
    """
    _check_alpha(alpha)
    if sign not in (1, -1):
        raise ModelError("sign must be +1 or -1")
    if not ell > 0:
        raise ModelError("ell must be positive")
    return DeficiencyElement(float(ell), float(alpha), _coeffs(c_seq, nmax), int(sign))


def deficiency_residual(elem, grid=None):
    """||(D - sign i) f|| / ||f|| on the grid."""
    f = elem.on_grid(grid)
    df = apply_dirac(f)
    res = ModeGridFunction(f.grid, f.ell, f.alpha, {})
    for key, (u, d, _, _) in df.comps.items():
        fu, fd, _, _ = f.comps[key]
        res.add(key, u - 1j * elem.sign * fu, d - 1j * elem.sign * fd)
    return math.sqrt(res.norm2() / f.norm2())


@dataclass(frozen=True)
class SingularMode:
    """Singular part of a domain element of D^(+) or D^(-).

    (+): sum_n lambda_n e^{ijs}(K_{1-alpha}(r<j>) e^{-i theta}, 0)
    (-): sum_n lambda_n e^{ijs}(0, K_alpha(r<j>))
    each normalized by 1/sqrt(2 pi ell).
    """
    ell: float
    alpha: float
    lambda_seq: dict
    extension_sign: int

    def __post_init__(self):
        _check_alpha(self.alpha)
        if self.extension_sign not in (1, -1):
            raise ModelError("extension_sign must be +1 or -1")

    def j(self, n):
        return 2.0 * math.pi * n / self.ell

    def on_grid(self, grid=None):
        grid = grid or RadialGrid()
        r = grid.r
        a = self.alpha
        f = ModeGridFunction(grid, self.ell, a, {})
        for n, lam in self.lambda_seq.items():
            jb = math.sqrt(1.0 + self.j(n) ** 2)
            x = r * jb
            if self.extension_sign > 0:
                f.add((n, -1), lam * _ksafe(1 - a, x), None, lam * jb * _kprime(1 - a, x),
                      np.zeros_like(r))
            else:
                f.add((n, -1), None, lam * _ksafe(a, x), np.zeros_like(r),
                      lam * jb * _kprime(a, x))
        return f


def singular_mode(ell, alpha, lambda_seq, extension_sign, nmax=DEFAULT_NMAX):
    return SingularMode(float(ell), float(alpha), _coeffs(lambda_seq, nmax), int(extension_sign))


@dataclass(frozen=True)
class ExtensionOutput:
    """D applied to a singular mode: per n, coefficients of the profiles
    e^{ijs} K_{1-alpha}(r<j>) e^{-i theta} (up) and e^{ijs} K_alpha(r<j>) (down)."""
    ell: float
    alpha: float
    up: dict
    down: dict

    def on_grid(self, grid=None):
        grid = grid or RadialGrid()
        r = grid.r
        a = self.alpha
        f = ModeGridFunction(grid, self.ell, a, {})
        for n in sorted(set(self.up) | set(self.down)):
            jb = math.sqrt(1.0 + (2.0 * math.pi * n / self.ell) ** 2)
            f.add((n, -1), self.up.get(n, 0) * _ksafe(1 - a, r * jb),
                  self.down.get(n, 0) * _ksafe(a, r * jb))
        return f


def apply_extension_action(mode):
    """Coefficient-level D^(+-) on a singular mode.

    D^(+): lambda (K_{1-a} e^{-i theta}, 0) -> lambda (j K_{1-a} e^{-i theta}, i<j> K_a)
    D^(-): lambda (0, K_a)                  -> lambda (i<j> K_{1-a} e^{-i theta}, -j K_a)
    """
    up, down = {}, {}
    for n, lam in mode.lambda_seq.items():
        j = mode.j(n)
        jb = math.sqrt(1.0 + j * j)
        if mode.extension_sign > 0:
            up[n] = lam * j
            down[n] = lam * 1j * jb
        else:
            up[n] = lam * 1j * jb
            down[n] = -lam * j
    return ExtensionOutput(mode.ell, mode.alpha, up, down)


def extension_action_residual(mode, grid=None):
    """Relative grid distance between the coefficient formula and direct application of D."""
    f = mode.on_grid(grid)
    direct = apply_dirac(f)
    formula = apply_extension_action(mode).on_grid(f.grid)
    diff = ModeGridFunction(f.grid, f.ell, f.alpha, {})
    for key, (u, d, _, _) in direct.comps.items():
        fu, fd, _, _ = formula.comps[key]
        diff.add(key, u - fu, d - fd)
    return math.sqrt(diff.norm2() / direct.norm2())


def singular_l2_norm(mode):
    """||f_sing||^2 = C sum |lambda_n|^2 / (1 + j^2), with C = C_alpha for (-) and C_{1-alpha} for (+)."""
    if not mode.lambda_seq:
        return 0.0
    a = mode.alpha if mode.extension_sign < 0 else 1.0 - mode.alpha
    weight = sum(abs(lam) ** 2 / (1.0 + mode.j(n) ** 2) for n, lam in mode.lambda_seq.items())
    return c_alpha(a).value * weight


def graph_norm_lower_bound(alpha):
    """C_alpha + C_{1-alpha}: ||f||^2 + ||D f||^2 >= this times ||lambda||^2."""
    _check_alpha(alpha)
    return c_alpha(alpha).value + c_alpha(1.0 - alpha).value


def graph_norm2(f):
    """||f||^2 + ||D f||^2 by grid quadrature."""
    return f.norm2() + apply_dirac(f).norm2()


def regular_bump(grid, ell, alpha, modes, r0=1.0, width=0.5):
    """Smooth spinor supported in r0 - width < r < r0 + width.

    ``modes`` maps (n, m) -> (a_up, a_down) complex amplitudes.
    """
    r = grid.r
    x = (r - r0) / width
    inside = np.abs(x) < 1.0
    phi = np.zeros_like(r)
    dphi = np.zeros_like(r)
    xi = x[inside]
    phi[inside] = np.exp(-1.0 / (1.0 - xi * xi))
    dphi[inside] = phi[inside] * (-2.0 * xi / (1.0 - xi * xi) ** 2) / width
    f = ModeGridFunction(grid, ell, alpha, {})
    for key, (au, ad) in modes.items():
        f.add(key, au * phi, ad * phi, au * dphi, ad * dphi)
    return f


def energy_decoupling_check(f):
    """Relative gap between ||D f||^2 and ||d_s f||^2 + ||transverse part of D f||^2.

    The two differ by 2 Re sum_j j <f, sigma_3 P f>, which vanishes for elements
    of the extension domains; returns |LHS - RHS| / max(LHS, tiny).
    """
    lhs = apply_dirac(f).norm2()
    ds = 0.0
    tr = 0.0
    for key in f.comps:
        j, u, d, t_up, t_dn = _parts(f, key)
        ds += f.grid.integrate(j * j * (np.abs(u) ** 2 + np.abs(d) ** 2))
        tr += f.grid.integrate(np.abs(t_up) ** 2 + np.abs(t_dn) ** 2)
    rhs = ds + tr
    return abs(lhs - rhs) / max(lhs, 1e-300)


def boundary_form(f, g):
    """<D f, g> - <f, D g> as the limit -i r (conj(d_f) u_g + conj(u_f) d_g) at r -> 0.

    Evaluated at the innermost grid radius.
    """
    r0 = f.grid.r[0]
    tot = 0j
    for key, (u, d, _, _) in f.comps.items():
        if key not in g.comps:
            continue
        u2, d2, _, _ = g.comps[key]
        tot += -1j * r0 * (np.conj(d[0]) * u2[0] + np.conj(u[0]) * d2[0])
    return tot
