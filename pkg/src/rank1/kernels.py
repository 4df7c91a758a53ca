"""Heat kernels and Bessel-Green-Riesz kernels on rank-one spaces.

Radial derivatives of the Gaussian e^{-r^2/4t} are carried symbolically as
finite sums of monomials

    coeff * r^a * sinh(r)^p * cosh(r)^q * t^{-d} * e^{-r^2/4t}

with exact rational coefficients.  Grouping the monomials by the power of
1/t gives functions H_d(r) that are analytic at r = 0 even though individual
monomials blow up there; below ``SERIES_RADIUS`` each H_d is evaluated from
its exact Taylor expansion, above it from the monomials directly.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import mpmath as mp
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate
from scipy.interpolate import CubicSpline

from .ball_geometry import Family, RadialProfile, SpaceDescriptor, sample_sphere
from .specfun import riesz_constant

Array = NDArray[np.float64]
Key = tuple[int, int, int, int]  # (a, p, q, d)

SERIES_RADIUS = 0.5
SERIES_ORDER = 24  # terms in r^2 kept after cancellation


# --- exact power series in x = r^2 -----------------------------------------

def _series_pow(base: list[Fraction], k: int, order: int) -> list[Fraction]:
    """(sum base_i x^i)^k for base_0 = 1 and integer k of either sign."""
    out = [Fraction(0)] * order
    out[0] = Fraction(1)
    for n in range(1, order):
        acc = Fraction(0)
        for j in range(1, min(n, len(base) - 1) + 1):
            acc += (k * j - n + j) * base[j] * out[n - j]
        out[n] = acc / n
    return out


def _series_mul(a: list[Fraction], b: list[Fraction], order: int) -> list[Fraction]:
    out = [Fraction(0)] * order
    for i, ai in enumerate(a[:order]):
        if ai == 0:
            continue
        for j in range(min(len(b), order - i)):
            out[i + j] += ai * b[j]
    return out


@lru_cache(maxsize=None)
def _sinhc_pow(p: int, order: int) -> tuple[Fraction, ...]:
    base = [Fraction(1, math.factorial(2 * i + 1)) for i in range(order)]
    return tuple(_series_pow(base, p, order))


@lru_cache(maxsize=None)
def _cosh_pow(q: int, order: int) -> tuple[Fraction, ...]:
    base = [Fraction(1, math.factorial(2 * i)) for i in range(order)]
    return tuple(_series_pow(base, q, order))


# --- symbolic expansion ----------------------------------------------------

@dataclass
class HeatKernelClosedForm:
    """Finite sum of r^a sinh^p cosh^q t^{-d} e^{-r^2/4t} monomials."""

    terms: dict[Key, Fraction] = field(default_factory=dict)

    @classmethod
    def gaussian(cls) -> "HeatKernelClosedForm":
        return cls({(0, 0, 0, 0): Fraction(1)})

    def _add(self, out: dict[Key, Fraction], key: Key, c: Fraction) -> None:
        v = out.get(key, Fraction(0)) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)

    def derivative(self) -> "HeatKernelClosedForm":
        out: dict[Key, Fraction] = {}
        for (a, p, q, d), c in self.terms.items():
            if a:
                self._add(out, (a - 1, p, q, d), c * a)
            if p:
                self._add(out, (a, p - 1, q + 1, d), c * p)
            if q:
                self._add(out, (a, p + 1, q - 1, d), c * q)
            self._add(out, (a + 1, p, q, d + 1), -c / 2)
        return HeatKernelClosedForm(out)

    def scaled(self, factor: Fraction, da: int = 0, dp: int = 0, dq: int = 0) -> "HeatKernelClosedForm":
        return HeatKernelClosedForm({(a + da, p + dp, q + dq, d): c * factor for (a, p, q, d), c in self.terms.items()})

    def minus_inv_sinh_d(self) -> "HeatKernelClosedForm":
        """-(1/sinh r) d/dr"""
        return self.derivative().scaled(Fraction(-1), dp=-1)

    def minus_inv_sinh2_d(self) -> "HeatKernelClosedForm":
        """-(1/sinh 2r) d/dr, using sinh 2r = 2 sinh r cosh r."""
        return self.derivative().scaled(Fraction(-1, 2), dp=-1, dq=-1)

    # -- grouping and evaluation --

    def groups(self) -> dict[int, dict[tuple[int, int, int], Fraction]]:
        g: dict[int, dict[tuple[int, int, int], Fraction]] = defaultdict(dict)
        for (a, p, q, d), c in self.terms.items():
            g[d][(a, p, q)] = c
        return dict(sorted(g.items()))

    def taylor(self, order: int = SERIES_ORDER) -> dict[int, list[Fraction]]:
        """Exact Taylor coefficients in r^2 of each H_d, negative powers checked to cancel."""
        out: dict[int, list[Fraction]] = {}
        for d, mono in self.groups().items():
            lowest = min(a + p for (a, p, _q) in mono)
            shift = max(0, -lowest)
            n = order + shift // 2 + 1
            acc: dict[int, Fraction] = defaultdict(Fraction)
            for (a, p, q), c in mono.items():
                ser = _series_mul(list(_sinhc_pow(p, n)), list(_cosh_pow(q, n)), n)
                for i, s in enumerate(ser):
                    if s:
                        acc[a + p + 2 * i] += c * s
            for e, v in acc.items():
                if v and (e < 0 or e % 2):
                    raise ArithmeticError(f"non-analytic remainder r^{e} in group t^-{d}")
            out[d] = [acc.get(2 * i, Fraction(0)) for i in range(order)]
        return out

    def compile(self) -> "CompiledClosedForm":
        return CompiledClosedForm(self)

    def evaluate(self, r: ArrayLike, t: float) -> Array:
        return self.compile()(r, t)


class CompiledClosedForm:
    """Float evaluator for a :class:`HeatKernelClosedForm`."""

    def __init__(self, form: HeatKernelClosedForm, radius: float = SERIES_RADIUS):
        self.radius = radius
        self.ds = sorted(form.groups())
        groups = form.groups()
        self.mono = {
            d: (
                np.array([k[0] for k in groups[d]], dtype=float),
                np.array([k[1] for k in groups[d]], dtype=float),
                np.array([k[2] for k in groups[d]], dtype=float),
                np.array([float(c) for c in groups[d].values()]),
            )
            for d in self.ds
        }
        tay = form.taylor()
        # Horner coefficients, highest first, in x = r^2
        self.poly = {d: np.array([float(c) for c in reversed(tay[d])]) for d in self.ds}

    def h_groups(self, r: ArrayLike, kappa: float = 0.0) -> Array:
        """Matrix H[d_index, ...] = e^{kappa r} H_d(r), free of t.

        The optional factor e^{kappa r} cancels the known exponential decay
        of H_d so that large radii do not underflow.
        """
        r = np.asarray(r, dtype=float)
        out = np.empty((len(self.ds),) + r.shape)
        small = r < self.radius
        rs = r[small]
        rl = r[~small]
        if rl.size:
            lr = np.log(rl)
            ls = rl + np.log1p(-np.exp(-2 * rl)) - math.log(2)
            lc = rl + np.log1p(np.exp(-2 * rl)) - math.log(2)
        for i, d in enumerate(self.ds):
            if rs.size:
                out[i][small] = np.polyval(self.poly[d], rs * rs) * np.exp(kappa * rs)
            if rl.size:
                a, p, q, c = self.mono[d]
                expo = np.outer(lr, a) + np.outer(ls, p) + np.outer(lc, q) + kappa * rl[:, None]
                out[i][~small] = np.exp(expo) @ c
        return out

    def combine_log(self, hg: Array, r: Array, t: ArrayLike, kappa: float = 0.0) -> tuple[Array, Array]:
        """Return (M, V) with sum_d t^{-d} e^{-r^2/4t} H_d(r) = e^{M} V.

        ``hg`` must come from :meth:`h_groups` with the same ``kappa``; M is
        the largest exponent for each t, so V stays O(1).
        """
        t = np.asarray(t, dtype=float)
        tt = t[..., None]
        base = -np.square(r) / (4 * tt) - kappa * r
        logt = np.log(tt)
        exps = [base - d * logt for d in self.ds]
        M = np.max(np.stack(exps), axis=(0, -1))
        total = 0.0
        for i, e in enumerate(exps):
            total = total + np.exp(e - M[..., None]) * hg[i]
        return M, total

    def combine(self, hg: Array, r: Array, t: ArrayLike) -> Array:
        """sum_d t^{-d} e^{-r^2/4t} H_d(r), broadcasting t against r."""
        t = np.asarray(t, dtype=float)
        M, V = self.combine_log(hg, r, np.atleast_1d(t))
        out = np.exp(M)[..., None] * V
        return out if t.ndim else out[0]

    def __call__(self, r: ArrayLike, t: float) -> Array:
        r = np.asarray(r, dtype=float)
        return self.combine(self.h_groups(r), r, t)


@lru_cache(maxsize=None)
def real_odd_form(mt: int) -> HeatKernelClosedForm:
    """(-(1/sinh r) d/dr)^mt e^{-r^2/4t}"""
    f = HeatKernelClosedForm.gaussian()
    for _ in range(mt):
        f = f.minus_inv_sinh_d()
    return f


@lru_cache(maxsize=None)
def rank_one_form(mt: int, mu: int) -> HeatKernelClosedForm:
    """(-(1/sinh 2r) d/dr)^mu (-(1/sinh r) d/dr)^mt e^{-r^2/4t}"""
    f = real_odd_form(mt)
    for _ in range(mu):
        f = f.minus_inv_sinh2_d()
    return f


@lru_cache(maxsize=None)
def _compiled(mt: int, mu: int) -> CompiledClosedForm:
    return rank_one_form(mt, mu).compile()


def b_const(mt: int) -> float:
    """Normalizing constant of the odd-dimensional real hyperbolic heat kernel."""
    return 2.0 ** (-mt - 1) * math.pi ** (-mt - 0.5)


def c_const(space: SpaceDescriptor) -> float:
    if space.family is Family.QUATERNIONIC:
        return 2.0 ** (-2 * space.m + 1.5) * math.pi ** (-2 * space.m - 0.5)
    if space.family is Family.CAYLEY:
        return 2.0**-4.5 * math.pi**-8.5
    raise ValueError("c constant defined for quaternionic and Cayley spaces")


def _structure(space: SpaceDescriptor) -> tuple[int, int]:
    """(mt, mu) for the reduction to an odd-dimensional real heat kernel."""
    if space.family is Family.QUATERNIONIC:
        return 2 * space.m - 2, 2
    if space.family is Family.CAYLEY:
        return 4, 4
    raise ValueError(f"unsupported family {space.family}")


def heat_kernel_real_odd(mt: int, t: float, rho: ArrayLike) -> Array:
    """h_t(rho, 2 mt + 1) on the real hyperbolic space of dimension 2 mt + 1."""
    if t <= 0:
        raise ValueError("t must be positive")
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr <= 0):
        raise ValueError("rho must be positive")
    out = b_const(mt) * t**-0.5 * math.exp(-mt * mt * t) * _compiled(mt, 0)(rho_arr, t)
    return out if np.ndim(rho) else float(out[0])


# --- the u-substitution quadrature -----------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _log_u_grid(v_lo: float = -50.0, v_hi: float = 16.0, width: float = 0.5) -> tuple[Array, Array]:
    edges = np.arange(v_lo, v_hi + width / 2, width)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * width
    v = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
    w = np.tile(half * _GL_WEIGHTS, mid.size)
    u = np.exp(v)
    return u, w * u  # du = u dv


@lru_cache(maxsize=64)
def _grid_for(v_hi: float) -> tuple[Array, Array]:
    return _log_u_grid(v_hi=v_hi)


def _u_grid(rho: float) -> tuple[Array, Array]:
    """Nodes reach u ~ e^{rho + 24}, far past where the integrand is negligible."""
    return _grid_for(float(max(16, math.ceil(rho) + 24)))


def _r_of_u(rho: float, u: Array) -> Array:
    """Solve cosh 2r - cosh 2rho = u^2 stably: sinh^2 r = sinh^2 rho + u^2/2."""
    return np.arcsinh(np.sqrt(math.sinh(rho) ** 2 + 0.5 * u * u))


def _truncate(vals: Array, weights: Array, rel: float = 1e-16) -> Array:
    """Weighted sum ignoring the tail beyond the last node above rel * peak."""
    contrib = vals * weights
    mag = np.abs(contrib)
    peak = mag.max(axis=-1, keepdims=True)
    keep = mag >= rel * peak
    # last kept index along the u-axis; everything after is dropped
    idx = np.where(keep.any(axis=-1), keep.shape[-1] - 1 - np.argmax(keep[..., ::-1], axis=-1), -1)
    mask = np.arange(keep.shape[-1]) <= idx[..., None]
    return np.sum(np.where(mask, contrib, 0.0), axis=-1)


def log_shifted_heat_kernel(space: SpaceDescriptor, t: ArrayLike, rho: float) -> Array:
    """log of e^{rho_X^2 t} e^{t Delta}(rho), vectorized over t."""
    mt, mu = _structure(space)
    comp = _compiled(mt, mu)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise ValueError("t must be positive")
    kappa = float(mt + 2 * mu)
    u, uw = _u_grid(rho)
    r = _r_of_u(rho, u)
    hg = comp.h_groups(r, kappa)
    M, V = comp.combine_log(hg, r, t, kappa)
    integral = _truncate(V, uw)
    with np.errstate(divide="ignore"):
        return math.log(c_const(space)) - 0.5 * np.log(t) + M + np.log(integral)


def shifted_heat_kernel(space: SpaceDescriptor, t: ArrayLike, rho: float) -> Array:
    """e^{rho_X^2 t} times the heat kernel at distance rho, vectorized over t."""
    out = np.exp(log_shifted_heat_kernel(space, t, rho))
    return out if np.ndim(t) else out[0]


def heat_kernel(space: SpaceDescriptor, t: float, rho: ArrayLike) -> Array:
    """e^{t Delta}(rho) on H_Q^m or the Cayley plane."""
    if t <= 0:
        raise ValueError("t must be positive")
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho_arr < 0):
        raise ValueError("rho must be nonnegative")
    logk = np.array([float(log_shifted_heat_kernel(space, t, x)[0]) for x in rho_arr])
    out = np.exp(logk - space.rho**2 * t)
    return out if np.ndim(rho) else out[0]


def log_density(space: SpaceDescriptor, r: ArrayLike) -> Array:
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore"):
        ls = r + np.log1p(-np.exp(-2 * r)) - math.log(2)
    lc = r + np.log1p(np.exp(-2 * r)) - math.log(2)
    return math.log(space.sphere_area) + space.p_sinh * ls + space.p_cosh * lc


def heat_kernel_mass(space: SpaceDescriptor, t: float, n_nodes: int = 400) -> float:
    """int e^{t Delta} dV by Gauss-Legendre in rho on a t-adapted window.

    The radial process drifts at speed ~Q with variance 2t, so the mass sits
    near rho = Q t; the window covers that with a wide margin.
    """
    hi = space.Q * t + 12.0 * math.sqrt(2 * t) + 8.0
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    rho = 0.5 * hi * (x + 1)
    w = 0.5 * hi * w
    logk = np.array([float(log_shifted_heat_kernel(space, t, x)[0]) for x in rho])
    logv = logk - space.rho**2 * t + log_density(space, rho)
    return float(np.sum(np.exp(logv) * w))


# --- Bessel-Green-Riesz kernels --------------------------------------------

@dataclass(frozen=True)
class BGRParams:
    space: SpaceDescriptor
    zeta: float
    gamma: float

    def __post_init__(self) -> None:
        if self.zeta < 0 or self.gamma <= 0:
            raise ValueError("need zeta >= 0 and gamma > 0")
        if self.zeta == 0 and not self.gamma < 3:
            raise ValueError("zeta = 0 requires gamma < 3 (the t-integral diverges otherwise)")
        if self.zeta > 0 and not self.gamma < self.space.N:
            raise ValueError("gamma must be below the real dimension")


def _mellin_nodes(x_lo: float, x_hi: float, width: float = 0.5) -> tuple[Array, Array]:
    n_pan = max(1, math.ceil((x_hi - x_lo) / width))
    edges = np.linspace(x_lo, x_hi, n_pan + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1] - edges[0])
    x = (mid[:, None] + half * _GL_NODES[None, :]).ravel()
    w = np.tile(half * _GL_WEIGHTS, mid.size)
    return x, w


def log_bgr_kernel(params: BGRParams, rho: float, t_max_factor: float = 1e7) -> float:
    """log k_{zeta,gamma}(rho) from the Mellin representation.

    k = Gamma(gamma/2)^{-1} int_0^inf t^{gamma/2-1} e^{-zeta^2 t} e^{t(Delta + rho_X^2)}(rho) dt,
    integrated in x = ln t.  For zeta = 0 the large-t tail, where the shifted
    heat kernel behaves like C t^{-3/2}, is added in closed form.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    half_g = params.gamma / 2
    zeta2 = params.zeta**2
    x_lo = math.log(rho * rho) - 9.0
    if zeta2 > 0:
        t_hi = max(80.0 / zeta2, 10.0 * (1.0 + rho * rho))
        t_hi = min(t_hi, t_max_factor * (1.0 + rho * rho))
    else:
        t_hi = t_max_factor * (1.0 + rho * rho)
    x_hi = math.log(t_hi)
    x, w = _mellin_nodes(x_lo, x_hi)
    t = np.exp(x)
    logs = log_shifted_heat_kernel(params.space, t, rho)
    logf = half_g * x - zeta2 * t + logs
    peak = np.max(logf)
    total = float(np.sum(np.exp(logf - peak) * w))
    if zeta2 > 0:
        tail_rate = zeta2 * t_hi
        if tail_rate < 60:
            # C t^{-3/2} tail against e^{-zeta^2 t}: incomplete gamma
            from scipy.special import gammaincc, gamma as sgamma

            a = half_g - 0.5
            c = math.exp(logs[-1] + 1.5 * x_hi - peak)
            if a > 0:
                total += c * zeta2 ** (-a) * sgamma(a) * gammaincc(a, tail_rate)
            else:
                total += c * t_hi ** (half_g - 1.5) * math.exp(-tail_rate) / tail_rate
    else:
        # fit S(t) t^{3/2} = C + D/t through the last node and one ~e^2 earlier
        j = int(np.searchsorted(x, x[-1] - 2.0))
        g1 = math.exp(logs[j] + 1.5 * x[j] - peak)
        g2 = math.exp(logs[-1] + 1.5 * x[-1] - peak)
        t1, t2 = t[j], t[-1]
        d = (g1 - g2) / (1 / t1 - 1 / t2)
        c = g2 - d / t2
        total += c * t2 ** (half_g - 1.5) / (1.5 - half_g) + d * t2 ** (half_g - 2.5) / (2.5 - half_g)
    return peak + math.log(total) - math.lgamma(half_g)


def bgr_kernel(params: BGRParams, rho: ArrayLike) -> Array:
    """k_{zeta,gamma}(rho) for a scalar or an array of radii."""
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    out = np.exp([log_bgr_kernel(params, float(r)) for r in rho_arr])
    return out if np.ndim(rho) else float(out[0])


def bgr_profile(params: BGRParams, rmax: float = 12.0, n: int = 160) -> RadialProfile:
    """Spline of log k on a grid (log-spaced near 0), wrapped as a RadialProfile.

    Below the first node the leading power law rho^{gamma - N}/gamma_N(gamma)
    is continued from the first node value.
    """
    lo = 1e-4
    grid = np.unique(np.concatenate([np.geomspace(lo, 1.0, n // 2), np.linspace(1.0, rmax, n // 2)]))
    logk = np.array([log_bgr_kernel(params, float(r)) for r in grid])
    spline = CubicSpline(np.log(grid), logk)
    slope_lo = params.gamma - params.space.N
    # beyond rmax continue with the exponential rate (zeta + Q/2)
    rate = params.zeta + params.space.Q / 2

    def f(rho: Array) -> Array:
        rho = np.asarray(rho, dtype=float)
        r = np.clip(rho, lo, rmax)
        out = spline(np.log(r))
        out = np.where(rho < lo, logk[0] + slope_lo * (np.log(np.maximum(rho, 1e-300)) - math.log(lo)), out)
        out = np.where(rho > rmax, logk[-1] - rate * (rho - rmax), out)
        return np.exp(out)

    power = (params.gamma - 2) / 2 if params.zeta > 0 else params.gamma - 2
    return RadialProfile(f, decay_rate=rate, decay_power=power, name=f"k[{params.zeta},{params.gamma}]")


def heat_kernel_profile(space: SpaceDescriptor, t: float, rmax: float | None = None, n: int = 240) -> RadialProfile:
    """Heat kernel tabulated in log form on [0, rmax] and splined."""
    if rmax is None:
        rmax = space.Q * t + 14.0 * math.sqrt(2 * t) + 8.0
    grid = np.linspace(0.0, rmax, n)
    logk = np.array([float(log_shifted_heat_kernel(space, t, float(r))[0]) for r in grid]) - space.rho**2 * t
    spline = CubicSpline(grid, logk)
    slope = float(spline(rmax, 1))

    def f(rho: Array) -> Array:
        rho = np.asarray(rho, dtype=float)
        inside = spline(np.clip(rho, 0.0, rmax))
        return np.exp(np.where(rho > rmax, logk[-1] + slope * (rho - rmax), inside))

    return RadialProfile(f, decay_rate=math.inf, name=f"heat[t={t}]")


# --- hypertrig integral ----------------------------------------------------

def hypertrig_integral(beta: float, rho: float) -> tuple[float, float]:
    """int_rho^inf cosh r sinh^{-beta} r / sqrt(cosh 2r - cosh 2rho) dr, two ways.

    The quadrature substitutes u^2 = cosh 2r - cosh 2rho, which turns the
    integrand into (1/2)(sinh^2 rho + u^2/2)^{-(beta+1)/2} on [0, inf).
    """
    if beta <= 0 or rho <= 0:
        raise ValueError("need beta > 0 and rho > 0")
    closed = math.gamma(0.5) * math.gamma(beta / 2) / (2 * math.sqrt(2) * math.gamma((1 + beta) / 2)) * math.sinh(rho) ** -beta
    s2 = math.sinh(rho) ** 2
    scale = math.sqrt(2 * s2)  # natural width in u

    def f(v: float) -> float:
        return 0.5 * (s2 * (1 + v * v)) ** (-(beta + 1) / 2) * scale

    quad, _ = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-13, limit=400)
    return closed, quad


def small_distance_constant(m: int, gamma: float, dps: int = 30) -> tuple[float, float]:
    """Leading constant of k_gamma at rho -> 0 on H_Q^m, assembled and expected.

    Assembled from the heat-kernel reduction to n = 4m - 3 dimensions and the
    hypertrig integral with beta = n + 3 - gamma; expected 1/gamma_{4m}(gamma).
    Evaluated in mpmath so the comparison is not limited by double rounding.
    """
    if m < 1 or not 0 < gamma < 4 * m:
        raise ValueError("need m >= 1 and 0 < gamma < 4m")
    with mp.workdps(dps):
        g = mp.mpf(gamma)
        n = 4 * m - 3

        def riesz(k: int) -> mp.mpf:
            # gamma_k(g) by its Gamma-quotient formula, continued past g >= k
            return mp.pi ** (mp.mpf(k) / 2) * 2**g * mp.gamma(g / 2) / mp.gamma((k - g) / 2)

        c_m = mp.mpf(2) ** (-2 * m + mp.mpf(3) / 2) * mp.pi ** (-2 * m - mp.mpf(1) / 2)
        b = mp.mpf(2) ** (-(2 * m - 2) - 1) * mp.pi ** (-(2 * m - 2) - mp.mpf(1) / 2)
        hyper = mp.gamma(mp.mpf(1) / 2) * mp.gamma((n + 3 - g) / 2) / (2 * mp.sqrt(2) * mp.gamma((n + 4 - g) / 2))
        assembled = c_m * (n - g) * (n + 2 - g) / (2 * riesz(n) * b) * hyper
        return float(assembled), float(1 / riesz(4 * m))


# --- radial convolution ----------------------------------------------------

def _block_dim(space: SpaceDescriptor) -> int:
    if space.family is Family.QUATERNIONIC:
        return 4
    if space.family is Family.CAYLEY:
        return 8
    raise NotImplementedError("radial convolution implemented for quaternionic and Cayley balls")


def _distance(r: Array, rho0: float, x: Array, y: Array) -> Array:
    """Distance from tanh(r) xi to tanh(rho0) e, where x = Re and y = |.|^2 of the e-block of xi.

    sinh^2 d = cosh^2 r cosh^2 rho0 (|z-w|^2 + |<z,w>|^2 - |z|^2|w|^2), which
    avoids the cancellation of the cosh form at short range.
    """
    a = np.tanh(r)
    b = math.tanh(rho0)
    core = (a - b) ** 2 + 2 * a * b * (1 - x) + a * a * b * b * (y - 1)
    s2 = np.cosh(r) ** 2 * math.cosh(rho0) ** 2 * np.maximum(core, 0.0)
    return np.arcsinh(np.sqrt(s2))


@dataclass(frozen=True)
class ConvolutionResult:
    value: float
    std_error: float | None
    samples: int | None = None


class _RadialProposal:
    """Radial law with density ~ |f tilt| dV on cells uniform in ln r.

    Sampling is exact for the piecewise-constant proposal and :meth:`pdf`
    returns its density with respect to dV, so importance weights stay
    unbiased whatever the cell resolution.
    """

    def __init__(self, space: SpaceDescriptor, f: RadialProfile, radius: float, n_cells: int = 4000, tilt: Callable[[Array], Array] | None = None):
        self.space = space
        self.s = np.linspace(math.log(1e-12), math.log(radius), n_cells + 1)
        self.ds = self.s[1] - self.s[0]
        r = np.exp(self.s)
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            phi = np.abs(r * f(r) * np.exp(log_density(space, r)))
            if tilt is not None:
                phi = phi * np.abs(tilt(r))
        phi = np.nan_to_num(phi, nan=0.0, posinf=0.0)
        mass = 0.5 * (phi[1:] + phi[:-1]) * self.ds
        # a floor keeps every cell reachable, so the mixture density never vanishes where f g does not
        mass = np.maximum(mass, 1e-12 * mass.max())
        self.prob = mass / mass.sum()
        self.cdf = np.cumsum(self.prob)

    def sample(self, rng: np.random.Generator, n: int) -> Array:
        cell = np.minimum(np.searchsorted(self.cdf, rng.random(n), side="right"), self.prob.size - 1)
        return np.exp(self.s[cell] + self.ds * rng.random(n))

    def pdf(self, r: Array) -> Array:
        """Density with respect to dV at radius r."""
        ls = np.log(np.maximum(r, 1e-300))
        cell = np.floor((ls - self.s[0]) / self.ds).astype(int)
        inside = (cell >= 0) & (cell < self.prob.size)
        q_s = np.where(inside, self.prob[np.clip(cell, 0, self.prob.size - 1)] / self.ds, 0.0)
        with np.errstate(over="ignore", divide="ignore"):
            return q_s / (r * np.exp(log_density(self.space, r)))


def _default_radius(space: SpaceDescriptor, f: RadialProfile, g: RadialProfile, rho0: float) -> float:
    # the integrand vanishes unless rho(z) < supp f and d(z, w0) < supp g
    bounds = [b for b in (f.support, rho0 + g.support) if math.isfinite(b)]
    if bounds:
        return min(bounds)
    rates = f.decay_rate + g.decay_rate
    excess = rates - space.Q
    if math.isinf(rates):
        excess = 4.0
    elif not excess > 0:
        raise ValueError("profiles do not decay fast enough for the convolution to converge")
    return rho0 + min(60.0, 45.0 / excess + 6.0)


def radial_convolve(
    space: SpaceDescriptor,
    f: RadialProfile,
    g: RadialProfile,
    rho0: float,
    method: str = "mc",
    samples: int = 1_000_000,
    seed: int | np.random.Generator = 0,
    radius: float | None = None,
    chunk: int = 200_000,
) -> ConvolutionResult:
    """(f * g)(rho0) = int f(rho(z)) g(d(z, w0)) dV(z) with rho(w0) = rho0.

    ``method="mc"`` is a balance-heuristic mixture of radial proposals centred
    at 0 (densities ~ |f(rho)| and ~ |f(rho) g(|rho - rho0|)|) and their mirror
    images centred at w0.  Points of the second kind are never built: for
    z = phi_{w0}(z') the pair (rho(z), d(z, w0)) equals (d(z', w0), rho(z')),
    so every component only needs the distance formula.  The estimator is
    sharp for rho0 of order sqrt(t) and loses efficiency once the mass of g
    sits in a thin angular cap seen from the origin; the quadrature backend
    has no such limitation.  ``method="quad"`` is a product rule in
    (radius, angle, block modulus) graded toward the point w0.
    """
    k = _block_dim(space)
    if radius is None:
        radius = _default_radius(space, f, g, rho0)
    if method == "quad":
        return ConvolutionResult(_convolve_quad(space, f, g, rho0, radius, k), None)
    if method != "mc":
        raise ValueError(f"unknown method {method!r}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    # (proposal, frame, share): frame 0 draws rho(z), frame 1 draws d(z, w0)
    comps = [
        (_RadialProposal(space, f, radius), 0, 0.15),
        (_RadialProposal(space, g, radius), 1, 0.15),
        (_RadialProposal(space, f, radius, tilt=lambda r: g(np.abs(r - rho0))), 0, 0.35),
        (_RadialProposal(space, g, radius, tilt=lambda d: f(np.abs(d - rho0))), 1, 0.35),
    ]
    counts = [int(samples * share) for _, _, share in comps]
    counts[-1] = samples - sum(counts[:-1])

    def mixture_pdf(r: Array, d: Array) -> Array:
        return sum(n / samples * prop.pdf(r if frame == 0 else d) for (prop, frame, _), n in zip(comps, counts))

    total, var_sum = 0.0, 0.0
    for (prop, frame, _), n_total in zip(comps, counts):
        vals = []
        done = 0
        while done < n_total:
            n = min(chunk, n_total - done)
            a = prop.sample(rng, n)
            xi = sample_sphere(space.N, rng, size=n)
            b = _distance(a, rho0, xi[:, 0], np.sum(xi[:, :k] ** 2, axis=1))
            r, d = (a, b) if frame == 0 else (b, a)
            with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
                v = f(r) * g(d) / mixture_pdf(r, d)
            vals.append(np.nan_to_num(v, nan=0.0, posinf=0.0, neginf=0.0))
            done += n
        v = np.concatenate(vals)
        total += float(v.sum())
        var_sum += float(v.var(ddof=1)) * v.size
    value = total / samples
    err = math.sqrt(var_sum) / samples
    return ConvolutionResult(value, err, samples)


def _graded_rule(lo: float, hi: float, focus: float, n_pan: int = 14, ratio: float = 0.35, order: int = 16) -> tuple[Array, Array]:
    """Gauss-Legendre panels on [lo, hi], refined geometrically toward ``focus``."""
    x0, w0 = np.polynomial.legendre.leggauss(order)
    edges = {lo, hi, focus}
    for side in (lo, hi):
        for i in range(1, n_pan):
            edges.add(focus + (side - focus) * ratio**i)
    e = np.array(sorted(v for v in edges if lo <= v <= hi))
    mid = 0.5 * (e[1:] + e[:-1])
    half = 0.5 * np.diff(e)
    return (mid[:, None] + half[:, None] * x0).ravel(), (half[:, None] * w0).ravel()


def _angular_rule(n_dim: int, k: int) -> tuple[Array, Array, Array]:
    """Nodes (x, y) and probability weights for (Re xi_1, |xi_1|^2), xi uniform on S^{n_dim-1}.

    Inside the k-block the angle to the real axis has density ~ sin^{k-2};
    1 - y has density ~ v^{(n-k)/2-1} (1-v)^{k/2-1}.  Both rules are graded
    toward theta = 0 and y = 1, where the point w0 sits.
    """
    th, wth = _graded_rule(0.0, math.pi, 0.0)
    wth = wth * np.sin(th) ** (k - 2)
    wth = wth / wth.sum()
    c = np.cos(th)
    if n_dim == k:
        return c, np.ones_like(c), wth
    v, wv = _graded_rule(0.0, 1.0, 0.0, n_pan=10, order=12)
    wv = wv * v ** ((n_dim - k) / 2 - 1) * (1 - v) ** (k / 2 - 1)
    wv = wv / wv.sum()
    y = 1 - v
    X = (np.sqrt(y)[:, None] * c[None, :]).ravel()
    Y = np.repeat(y, c.size)
    W = (wv[:, None] * wth[None, :]).ravel()
    return X, Y, W


def _convolve_quad(space: SpaceDescriptor, f: RadialProfile, g: RadialProfile, rho0: float, radius: float, k: int) -> float:
    X, Y, W = _angular_rule(space.N, k)
    # ln r panels near the origin, then panels in r graded toward the origin and toward rho0
    s_nodes, s_w = _mellin_nodes(math.log(1e-12), math.log(1e-2), width=0.5)
    pieces = [(np.exp(s_nodes), s_w * np.exp(s_nodes))]
    seam = min(rho0 / 2 if rho0 > 0.1 else 1.0, radius)
    pieces.append(_graded_rule(1e-2, seam, 1e-2, n_pan=10, ratio=0.3))
    if seam < radius:
        pieces.append(_graded_rule(seam, radius, min(max(rho0, seam), radius), n_pan=18, ratio=0.4))
    r = np.concatenate([p[0] for p in pieces])
    wr = np.concatenate([p[1] for p in pieces])
    with np.errstate(over="ignore", invalid="ignore"):
        radial = np.nan_to_num(f(r) * np.exp(log_density(space, r)))
    total = 0.0
    step = max(1, 2_000_000 // X.size)
    for i in range(0, r.size, step):
        d = _distance(r[i : i + step, None], rho0, X[None, :], Y[None, :])
        with np.errstate(over="ignore", invalid="ignore"):
            gd = np.nan_to_num(g(d))
        total += float(np.sum(wr[i : i + step] * radial[i : i + step] * (gd @ W)))
    return total


# --- Euclidean Riesz convolution -------------------------------------------

def euclidean_riesz_convolution_mc(g1: float, g2: float, k: int = 4, y_norm: float = 1.0, samples: int = 400_000, seed: int = 0) -> tuple[float, float, float]:
    """Monte Carlo of int_{R^k} |x|^{g1-k} |y-x|^{g2-k} dx against its closed form.

    Proposal: equal mixture of two radial laws centred at 0 and at y, each
    with density ~ r^{g-k} near its centre and a Pareto tail.  Returns
    (estimate, std_error, closed_form).
    """
    if not (0 < g1 < k and 0 < g2 < k and g1 + g2 < k):
        raise ValueError("need 0 < g1, g2 and g1 + g2 < k")
    rng = np.random.default_rng(seed)
    y = np.zeros(k)
    y[0] = y_norm
    tail = 1.0

    def draw_radius(a: float, n: int) -> Array:
        # pdf p(r) = C r^{a-1} on (0,1], C r^{-tail-1} on (1, inf), with C = 1/(1/a + 1/tail)
        c = 1.0 / (1.0 / a + 1.0 / tail)
        u = rng.random(n)
        inner = c / a
        return np.where(u < inner, (u / inner) ** (1.0 / a), (1.0 - (u - inner) / (c / tail)) ** (-1.0 / tail))

    def radial_pdf(r: Array, a: float) -> Array:
        c = 1.0 / (1.0 / a + 1.0 / tail)
        return np.where(r <= 1.0, c * r ** (a - 1), c * r ** (-tail - 1))

    area = 2 * math.pi ** (k / 2) / math.gamma(k / 2)
    n1 = samples // 2
    x0 = draw_radius(g1, n1)[:, None] * sample_sphere(k, rng, size=n1)
    x1 = y + draw_radius(g2, samples - n1)[:, None] * sample_sphere(k, rng, size=samples - n1)
    x = np.vstack([x0, x1])
    a0 = np.linalg.norm(x, axis=1)
    a1 = np.linalg.norm(x - y, axis=1)
    q = 0.5 * radial_pdf(a0, g1) / (area * a0 ** (k - 1)) + 0.5 * radial_pdf(a1, g2) / (area * a1 ** (k - 1))
    vals = a0 ** (g1 - k) * a1 ** (g2 - k) / q
    est = float(vals.mean())
    err = float(vals.std(ddof=1) / math.sqrt(samples))
    closed = riesz_constant(k, g1).value * riesz_constant(k, g2).value / riesz_constant(k, g1 + g2).value * y_norm ** (g1 + g2 - k)
    return est, err, closed


# --- derivative bounds -----------------------------------------------------

@dataclass
class TrigPowerForm:
    """Sum of c * r^{base + a} sinh^p cosh^q with a real base exponent."""

    base: float
    terms: dict[tuple[int, int, int], float]

    def derivative(self) -> "TrigPowerForm":
        out: dict[tuple[int, int, int], float] = defaultdict(float)
        for (a, p, q), c in self.terms.items():
            e = self.base + a
            if e != 0:
                out[(a - 1, p, q)] += c * e
            if p:
                out[(a, p - 1, q + 1)] += c * p
            if q:
                out[(a, p + 1, q - 1)] += c * q
        return TrigPowerForm(self.base, {k: v for k, v in out.items() if v != 0})

    def minus_inv_sinh_d(self) -> "TrigPowerForm":
        d = self.derivative()
        return TrigPowerForm(self.base, {(a, p - 1, q): -c for (a, p, q), c in d.terms.items()})

    def minus_inv_sinh2_d(self) -> "TrigPowerForm":
        d = self.derivative()
        return TrigPowerForm(self.base, {(a, p - 1, q - 1): -c / 2 for (a, p, q), c in d.terms.items()})

    def __call__(self, r: ArrayLike) -> Array:
        r = np.asarray(r, dtype=float)
        lr = np.log(r)
        ls = r + np.log1p(-np.exp(-2 * r)) - math.log(2)
        lc = r + np.log1p(np.exp(-2 * r)) - math.log(2)
        total = np.zeros_like(r)
        for (a, p, q), c in self.terms.items():
            total += c * np.exp((self.base + a) * lr + p * ls + q * lc)
        return total


@dataclass(frozen=True)
class DerivativeBoundReport:
    p: int
    q: int
    beta: float
    max_ratio: float
    ratios: tuple[float, ...]
    tail_monotone: bool


def derivative_bound_check(p: int, q: int, beta: float, r_grid: ArrayLike) -> DerivativeBoundReport:
    """Ratio of (-(1/sinh 2r)d)^q (-(1/sinh r)d)^p [r^{beta-2}/sinh r] to r^{beta-2} e^{-(p+2q+1) r}."""
    r = np.asarray(r_grid, dtype=float)
    if np.any(r <= 0):
        raise ValueError("grid must lie in (0, inf)")
    form = TrigPowerForm(beta - 2, {(0, -1, 0): 1.0})
    for _ in range(p):
        form = form.minus_inv_sinh_d()
    for _ in range(q):
        form = form.minus_inv_sinh2_d()
    vals = form(r)
    ratios = np.abs(vals) / (r ** (beta - 2) * np.exp(-(p + 2 * q + 1) * r))
    tail = np.abs(vals[r >= 2.0])
    monotone = bool(np.all(np.diff(tail) <= 0)) if tail.size > 1 else True
    return DerivativeBoundReport(p, q, beta, float(ratios.max()), tuple(map(float, ratios)), monotone)


# --- convolution hypotheses ------------------------------------------

def convolution_hypothesis(space: SpaceDescriptor, lam1: float, lam2: float, g1: float, g2: float) -> bool:
    """Weight condition of the small-distance convolution estimates, as stated per family.

    Quaternionic: lam1 + lam2 > g1 + g2 - 4m + 2.  Cayley: lam1 + lam2 > g1 + g2 - 10.
    """
    if space.family is Family.QUATERNIONIC:
        return lam1 + lam2 > g1 + g2 - 4 * space.m + 2
    if space.family is Family.CAYLEY:
        return lam1 + lam2 > g1 + g2 - 10
    raise ValueError("hypothesis stated for quaternionic and Cayley spaces only")
