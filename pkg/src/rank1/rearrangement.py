"""Distribution functions, decreasing rearrangements and Lorentz norms of radial functions.

All sets are measured with the Riemannian volume, so a radial superlevel set
is a union of geodesic annuli.  Profiles without declared breakpoints are
treated as nonincreasing in rho, which gives the fast path
f*(t) = |f|(R(t)) with |B_{R(t)}| = t.  Profiles with breakpoints go through
bisection on the level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .ball_geometry import RadialProfile, SpaceDescriptor
from .kernels import BGRParams, ConvolutionResult, bgr_profile, log_bgr_kernel, log_density, radial_convolve
from .specfun import riesz_constant, sphere_area

Array = NDArray[np.float64]

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_SERIES_EDGE = 1e-3
_R_MAX = 80.0


# --- volume of geodesic balls and its inverse ---------------------------------


class VolumeTable:
    """log|B_r| on [0, 80] and its inverse, vectorised.

    Panels of 20-point Gauss-Legendre accumulate the volume in log form so
    nothing overflows; below r = 1e-3 a two-term series is used.
    """

    def __init__(self, space: SpaceDescriptor):
        self.space = space
        self._c2 = space.N * (space.p_sinh / 6 + space.p_cosh / 2) / (space.N + 2)
        self._log_lead = math.log(space.sphere_area / space.N)
        nodes = np.concatenate([np.geomspace(_SERIES_EDGE, 1.0, 40), np.arange(1.25, _R_MAX + 0.125, 0.25)])
        logv = np.empty_like(nodes)
        logv[0] = self._series(nodes[:1])[0]
        for i in range(1, nodes.size):
            logv[i] = np.logaddexp(logv[i - 1], self._log_panel(nodes[i - 1], nodes[i : i + 1])[0])
        self.nodes, self.logv = nodes, logv

    def _series(self, r: Array) -> Array:
        return self._log_lead + self.space.N * np.log(r) + np.log1p(self._c2 * r * r)

    def _log_panel(self, a: float | Array, b: Array) -> Array:
        """log int_a^b density, for arrays b of panel ends."""
        a = np.broadcast_to(np.asarray(a, dtype=float), b.shape)
        half = 0.5 * (b - a)
        x = 0.5 * (a + b)[:, None] + half[:, None] * _GL_X[None, :]
        ld = log_density(self.space, x)
        top = ld.max(axis=1)
        s = np.sum(np.exp(ld - top[:, None]) * _GL_W[None, :], axis=1)
        with np.errstate(divide="ignore"):
            return top + np.log(s * half)

    def log_volume(self, r: ArrayLike) -> Array:
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r).ravel()
        out = np.full(flat.shape, -np.inf)
        small = (flat > 0) & (flat < _SERIES_EDGE)
        out[small] = self._series(flat[small])
        big = flat >= _SERIES_EDGE
        if np.any(big):
            rb = np.minimum(flat[big], _R_MAX)
            i = np.clip(np.searchsorted(self.nodes, rb, side="right") - 1, 0, self.nodes.size - 1)
            extra = self._log_panel(self.nodes[i], rb)
            out[big] = np.logaddexp(self.logv[i], extra)
            out[big & (flat > _R_MAX)] = np.inf
        return out.reshape(r.shape)

    def volume(self, r: ArrayLike) -> Array:
        with np.errstate(over="ignore"):
            return np.exp(self.log_volume(r))

    def radius_log(self, log_t: ArrayLike) -> Array:
        """R with log|B_R| = log_t (Newton in log volume)."""
        lt = np.atleast_1d(np.asarray(log_t, dtype=float)).astype(float)
        if np.any(lt > self.logv[-1]):
            raise ValueError("volume beyond the tabulated range")
        r = np.where(
            lt < self.logv[0],
            np.exp((lt - self._log_lead) / self.space.N),
            np.interp(lt, self.logv, self.nodes),
        )
        for _ in range(60):
            lv = self.log_volume(r)
            step = (lv - lt) * np.exp(lv - log_density(self.space, r))
            r_new = np.clip(r - step, 0.5 * r, 2.0 * r)
            if np.all(np.abs(r_new - r) <= 1e-15 * r):
                r = r_new
                break
            r = r_new
        return r.reshape(np.shape(log_t))

    def radius(self, t: ArrayLike) -> Array:
        t = np.asarray(t, dtype=float)
        if np.any(t <= 0):
            raise ValueError("t must be positive")
        return self.radius_log(np.log(t))


@lru_cache(maxsize=16)
def volume_table(space: SpaceDescriptor) -> VolumeTable:
    return VolumeTable(space)


# --- superlevel sets -------------------------------------------------------------


def _segments(f: RadialProfile) -> list[tuple[float, float]]:
    end = f.support if math.isfinite(f.support) else math.inf
    pts = [0.0] + sorted(b for b in f.breakpoints if 0 < b < end) + [end]
    return list(zip(pts[:-1], pts[1:]))


def _absf(f: RadialProfile, r: float) -> float:
    with np.errstate(all="ignore"):
        v = abs(float(f(np.array([r]))[0]))
    return v if math.isfinite(v) else math.inf


def _inner(a: float, b: float) -> tuple[float, float]:
    lo = a + 1e-13 * max(1.0, a) if a > 0 else 1e-12
    hi = b * (1 - 1e-13) if math.isfinite(b) else math.inf
    return lo, hi


def superlevel_intervals(f: RadialProfile, s: float) -> list[tuple[float, float]]:
    """Radial intervals on which |f| > s, one per monotone piece."""
    out = []
    for a, b in _segments(f):
        lo, hi = _inner(a, b)
        f_lo = _absf(f, lo)
        if math.isinf(hi):
            decreasing = True
        else:
            decreasing = f_lo >= _absf(f, hi)
        g = lambda r: _absf(f, r) - s  # noqa: E731
        if decreasing:
            if f_lo <= s:
                continue
            if math.isinf(hi):
                hi = max(2 * lo, 1.0)
                while g(hi) > 0:
                    hi *= 2
                    if hi > _R_MAX:
                        raise ValueError("profile does not drop below the level within the volume table")
            elif g(hi) > 0:
                out.append((a, b))
                continue
            out.append((a, optimize.brentq(g, lo, hi, xtol=1e-14, rtol=1e-15)))
        else:
            if _absf(f, hi) <= s:
                continue
            if f_lo > s:
                out.append((a, b))
                continue
            out.append((optimize.brentq(g, lo, hi, xtol=1e-14, rtol=1e-15), b))
    return out


def distribution_function(space: SpaceDescriptor, f: RadialProfile, s: float) -> float:
    """lambda_f(s) = |{|f| > s}|."""
    if not s > 0:
        raise ValueError("level must be positive")
    vt = volume_table(space)
    total = 0.0
    for a, b in superlevel_intervals(f, s):
        hi = float(vt.volume(b)) if math.isfinite(b) else math.inf
        total += hi - (float(vt.volume(a)) if a > 0 else 0.0)
    return total


def _sup_abs(f: RadialProfile) -> float:
    cand = []
    for a, b in _segments(f):
        lo, hi = _inner(a, b)
        cand.append(_absf(f, lo))
        if math.isfinite(hi):
            cand.append(_absf(f, hi))
    return max(cand)


def decreasing_rearrangement(space: SpaceDescriptor, f: RadialProfile, t: ArrayLike) -> Array:
    """f*(t) = inf{s > 0 : lambda_f(s) <= t}."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise ValueError("t must be positive")
    vt = volume_table(space)
    if not f.breakpoints:
        with np.errstate(all="ignore"):
            return np.abs(f(vt.radius(t_arr)))
    top = _sup_abs(f)
    if math.isinf(top):
        raise ValueError("unbounded profiles must be monotone")
    out = np.empty(t_arr.size)
    for i, ti in enumerate(t_arr.ravel()):
        lo, hi = 0.0, top
        while hi - lo > 1e-10 * top:
            mid = 0.5 * (lo + hi)
            if distribution_function(space, f, mid) <= ti:
                hi = mid
            else:
                lo = mid
        out[i] = hi if hi > 1e-10 * top else 0.0
    return out.reshape(t_arr.shape)


def _log_quad(fn: Callable[[float], float], lo: float, hi: float) -> float:
    """int_lo^hi fn(x) dx with lo possibly 0 or hi infinite, split in log scale."""
    val, _ = integrate.quad(fn, lo, hi, limit=400, epsabs=0.0, epsrel=1e-11)
    return val


def _radial_integral(space: SpaceDescriptor, fn: Callable[[Array], Array], lo: float, hi: float) -> float:
    """int_lo^hi fn(r) dV-density dr with Gauss-Legendre panels.

    Panels are geometric in r below 1 (down to 1e-16 hi when lo = 0) and of
    width 0.25 above, which resolves both the r^{N-1} and the e^{Qr} regimes.
    """
    cut = min(max(lo, 1.0), hi)
    edges = []
    if lo < cut:
        start = max(lo, 1e-16 * cut)
        edges.append(np.geomspace(start, cut, max(2, int(math.log(cut / start) / 0.5) + 1)))
    if cut < hi:
        edges.append(np.linspace(cut, hi, max(2, int(math.ceil((hi - cut) / 0.25)) + 1)))
    e = np.unique(np.concatenate(edges))
    a, b = e[:-1], e[1:]
    x = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * _GL_X[None, :]
    w = 0.5 * (b - a)[:, None] * _GL_W[None, :]
    with np.errstate(all="ignore"):
        v = np.asarray(fn(x.ravel()), dtype=float).reshape(x.shape)
        ld = log_density(space, x)
        mag = np.abs(v)
        terms = np.where(mag > 0, np.sign(v) * np.exp(np.log(np.where(mag > 0, mag, 1.0)) + ld), 0.0)
    return float(np.sum(np.where(np.isnan(terms), 0.0, terms) * w))


@dataclass(frozen=True)
class RearrangedFunction:
    """t -> f*(t) for a radial profile on a given space."""

    space: SpaceDescriptor
    profile: RadialProfile

    @property
    def monotone(self) -> bool:
        return not self.profile.breakpoints

    def __call__(self, t: ArrayLike) -> Array:
        return decreasing_rearrangement(self.space, self.profile, t)

    def distribution(self, s: float) -> float:
        return distribution_function(self.space, self.profile, s)

    def primitive(self, t: float) -> float:
        """int_0^t f*(s) ds."""
        if t <= 0:
            raise ValueError("t must be positive")
        if self.monotone:
            R = float(volume_table(self.space).radius(t))
            if math.isfinite(self.profile.support):
                R = min(R, self.profile.support)
            return _radial_integral(self.space, lambda r: np.abs(self.profile(r)), 0.0, R)
        return _log_quad(lambda x: float(self(math.exp(x))) * math.exp(x), math.log(t) - 60.0, math.log(t))

    def double_star(self, t: float) -> float:
        return self.primitive(t) / t

    def tail_product(self, other: "RearrangedFunction", t: float) -> float:
        """int_t^infty f*(s) g*(s) ds."""
        if self.monotone and other.monotone and self.space == other.space:
            R = float(volume_table(self.space).radius(t))

            def fn(r: Array) -> Array:
                return np.abs(self.profile(r) * other.profile(r))

            ends = [e for e in (self.profile.support, other.profile.support) if math.isfinite(e)]
            hi = min(ends) if ends else _R_MAX
            return _radial_integral(self.space, fn, R, hi) if hi > R else 0.0
        return _log_quad(lambda x: float(self(math.exp(x)) * other(math.exp(x))) * math.exp(x), math.log(t), 200.0)


def double_star(f: "RearrangedFunction | Callable[[float], float]", t: float) -> float:
    """f**(t) = (1/t) int_0^t f*(s) ds for a rearranged function or any nonincreasing callable."""
    if t <= 0:
        raise ValueError("t must be positive")
    if isinstance(f, RearrangedFunction):
        return f.double_star(t)
    near, far = t * 1e-60, t * 1e-30
    if near * float(f(near)) >= 1e-3 * far * float(f(far)):
        raise ValueError("f* is not integrable at 0")
    val = _log_quad(lambda x: float(f(math.exp(x))) * math.exp(x), math.log(t) - 140.0, math.log(t))
    return val / t


def lorentz_norm(p: float, q: float, f: RadialProfile, space: SpaceDescriptor) -> float:
    """||f||_{L^{p,q}}: ||t^{1/p - 1/q} f*(t)||_{L^q(dt)}, or sup t^{1/p} f*(t) for q = inf.

    Returns +inf when the defining integral diverges.
    """
    if not 1 < p < math.inf or not 1 <= q <= math.inf:
        raise ValueError("need 1 < p < inf and 1 <= q <= inf")
    vt = volume_table(space)
    hi = f.support if math.isfinite(f.support) else _R_MAX

    if not f.breakpoints:
        def logterm(r: float) -> float:
            v = _absf(f, r)
            if v == 0.0:
                return -math.inf
            return float(vt.log_volume(r)) / p + math.log(v)

        if q == math.inf:
            xs = np.linspace(math.log(1e-8), math.log(hi * (1 - 1e-12)), 2000)
            vals = np.array([logterm(math.exp(x)) for x in xs])
            i = int(np.argmax(vals))
            if i == xs.size - 1 and hi == _R_MAX:
                return math.inf
            lo_x, hi_x = xs[max(i - 1, 0)], xs[min(i + 1, xs.size - 1)]
            res = optimize.minimize_scalar(lambda x: -logterm(math.exp(x)), bounds=(lo_x, hi_x), method="bounded", options={"xatol": 1e-12})
            return math.exp(max(vals[i], -res.fun))

        def integrand(r: float) -> float:
            lt = logterm(r)
            if lt == -math.inf:
                return 0.0
            return math.exp(q * lt - float(vt.log_volume(r)) + float(log_density(space, r)))

        if hi == _R_MAX and integrand(hi) * hi > 1e-10:
            return math.inf
        val = _log_quad(lambda x: integrand(math.exp(x)) * math.exp(x), math.log(1e-10), math.log(hi))
        return val ** (1 / q) if math.isfinite(val) else math.inf

    # layer cake: int t^{q/p - 1} f*^q dt = p int s^{q-1} lambda_f(s)^{q/p} ds, one lambda_f per level
    log_top = math.log(_sup_abs(f))

    def log_term(x: float) -> float:
        lam = distribution_function(space, f, math.exp(x))
        return x + math.log(lam) / p if lam > 0 else -math.inf

    try:
        if q == math.inf:
            return math.exp(max(log_term(x) for x in np.linspace(log_top - 345.0, log_top, 1400)))
        edges = np.linspace(log_top - 345.0, log_top, 36)
        val = p * sum(_log_quad(lambda x: math.exp(q * log_term(x)), a, b) for a, b in zip(edges[:-1], edges[1:]))
    except ValueError:
        # a level set reaches past the volume table
        return math.inf
    return val ** (1 / q)


def lorentz_norm_star(p: float, q: float, f: RadialProfile, space: SpaceDescriptor) -> float:
    """The equivalent norm built from f** instead of f*."""
    if not 1 < p < math.inf or not 1 <= q <= math.inf:
        raise ValueError("need 1 < p < inf and 1 <= q <= inf")
    rf = RearrangedFunction(space, f)
    vt = volume_table(space)
    log_hi = float(vt.log_volume(f.support)) if math.isfinite(f.support) else 700.0
    log_lo = log_hi - 70.0 if math.isfinite(f.support) else -80.0
    if q == math.inf:
        xs = np.linspace(log_lo, log_hi, 400)
        return max(math.exp(x / p) * rf.double_star(math.exp(x)) for x in xs)
    edges = np.linspace(log_lo, log_hi, max(2, int((log_hi - log_lo) / 10) + 1))
    integrand = lambda x: (math.exp(x / p) * rf.double_star(math.exp(x))) ** q  # noqa: E731
    val = sum(_log_quad(integrand, a, b) for a, b in zip(edges[:-1], edges[1:]))
    # past log_hi the primitive is constant, so f** = P / t
    P = rf.primitive(math.exp(log_hi))
    val += P**q * math.exp(log_hi * (q / p - q)) / (q - q / p)
    return val ** (1 / q)


# --- equimeasurability -----------------------------------------------------------


@dataclass(frozen=True)
class EquimeasurabilityReport:
    levels: Array
    lambda_f: Array
    brackets_hold: Array
    monotone: bool

    @property
    def ok(self) -> bool:
        return self.monotone and bool(np.all(self.brackets_hold))


def equimeasurability_check(space: SpaceDescriptor, f: RadialProfile, n_levels: int = 20, eps: float = 1e-6) -> EquimeasurabilityReport:
    """Check lambda_{f*} = lambda_f at levels taken from f itself.

    With t = lambda_f(s), f*(t (1 - eps)) > s >= f*(t (1 + eps)) says the
    superlevel set of f* at s has measure t up to a relative eps.  Levels
    are 0.999 |f(r)| on a log grid of radii; f* is also checked to be
    nonincreasing on a log grid of t.
    """
    end = 0.99 * f.support if math.isfinite(f.support) else 3.0
    radii = np.geomspace(min(1e-2, end / 10), end, n_levels)
    levels = 0.999 * np.abs(f(radii))
    levels = levels[levels > 0]
    rf = RearrangedFunction(space, f)
    lam = np.array([distribution_function(space, f, float(s)) for s in levels])
    # every level sits below a value of |f|, so its superlevel set has positive measure
    hold = np.array([t > 0 and float(rf(t * (1 - eps))) > s >= float(rf(t * (1 + eps))) for s, t in zip(levels, lam)])
    vt = volume_table(space)
    ts = np.geomspace(float(vt.volume(radii[0])) * 1e-3, float(vt.volume(end)) * 10, 60)
    star = rf(ts)
    return EquimeasurabilityReport(levels, lam, hold, bool(np.all(np.diff(star) <= 1e-12 * np.max(star))))


def shipped_profiles() -> dict[str, RadialProfile]:
    """Reference radial profiles: monotone, compactly supported, and one with an interior maximum."""
    return {
        "indicator": RadialProfile(lambda r: np.ones_like(r), support=1.0, name="indicator"),
        "exponential": RadialProfile(lambda r: np.exp(-6.0 * r), decay_rate=6.0, name="exp(-6r)"),
        "gaussian": RadialProfile(lambda r: np.exp(-r * r), decay_rate=math.inf, name="gaussian"),
        "bump": RadialProfile(lambda r: (1 - r * r) ** 4, support=1.0, name="bump"),
        "shell": RadialProfile(lambda r: r * r * np.exp(-r * r), decay_rate=math.inf, breakpoints=(1.0,), name="shell"),
    }


# --- O'Neil bound ------------------------------------------------------------------


@dataclass(frozen=True)
class ONeilReport:
    t: Array
    lhs: Array
    rhs: Array
    sigma: Array
    violations: int

    @property
    def margin(self) -> float:
        """Smallest (rhs - lhs) / rhs over the grid."""
        return float(np.min((self.rhs - self.lhs) / self.rhs))

    @property
    def holds(self) -> bool:
        return self.violations == 0


def tabulated_profile(rho: Array, values: Array, name: str = "tab") -> RadialProfile:
    """Monotone-piecewise cubic interpolant, with breakpoints at local extrema."""
    rho, values = np.asarray(rho, float), np.asarray(values, float)
    interp = PchipInterpolator(rho, values, extrapolate=False)
    diffs = np.sign(np.diff(values))
    turns = tuple(float(rho[i + 1]) for i in range(diffs.size - 1) if diffs[i] * diffs[i + 1] < 0)
    last = float(rho[-1])

    def fn(r: Array) -> Array:
        return np.nan_to_num(interp(np.clip(r, rho[0], last)))

    return RadialProfile(fn, support=last, breakpoints=turns, name=name)


def oneil_check(
    space: SpaceDescriptor,
    f: RadialProfile,
    g: RadialProfile,
    t_grid: ArrayLike,
    method: str = "mc",
    samples: int = 100_000,
    seed: int = 0,
    rel_tol: float = 1e-9,
) -> ONeilReport:
    """u*(t) <= (1/t) int_0^t f* int_0^t g* + int_t^inf f* g*, u = f * g, on a t-grid.

    u is evaluated by ``radial_convolve`` at 0 and at the radii R(t) of the
    grid, interpolated piecewise-monotonically and rearranged.  A violation is
    counted when lhs - rhs exceeds 3 standard errors plus ``rel_tol * rhs``.
    """
    t = np.sort(np.asarray(t_grid, dtype=float))
    if t.size == 0:
        raise ValueError("empty t-grid")
    vt = volume_table(space)
    radii = np.concatenate([[0.0], vt.radius(t)])
    rng = np.random.default_rng(seed)
    conv: list[ConvolutionResult] = [radial_convolve(space, f, g, float(r), method=method, samples=samples, seed=rng) for r in radii]
    u = np.array([c.value for c in conv])
    se = np.array([c.std_error or 0.0 for c in conv])
    # extend past the last radius so the profile does not end abruptly at R(t_max)
    tail = radii[-1] * 1.5 + 1.0
    prof = tabulated_profile(np.append(radii, tail), np.append(u, 0.0), name="f*g")
    lhs = RearrangedFunction(space, prof)(t)
    sig = np.interp(vt.radius(t), radii, se)
    rf, rg = RearrangedFunction(space, f), RearrangedFunction(space, g)
    rhs = np.array([rf.primitive(ti) * rg.primitive(ti) / ti + rf.tail_product(rg, ti) for ti in t])
    bad = lhs - rhs > 3 * sig + rel_tol * rhs
    return ONeilReport(t, lhs, rhs, sig, int(np.sum(bad)))


# --- rearranged Bessel-Green-Riesz kernels -------------------------------------------


@dataclass(frozen=True)
class PowerFit:
    exponent: float
    coefficient: float
    log_power: float
    residual: float


def _fit(log_t: Array, log_y: Array, log_power: float) -> PowerFit:
    with np.errstate(invalid="ignore"):
        corr = log_power * np.log(log_t) if log_power else 0.0
    A = np.vstack([log_t, np.ones_like(log_t)]).T
    coef, res, *_ = np.linalg.lstsq(A, log_y - corr, rcond=None)
    r = float(np.max(np.abs(A @ coef - (log_y - corr))))
    return PowerFit(float(coef[0]), float(math.exp(coef[1])), log_power, r)


def rearranged_kernel(space: SpaceDescriptor, gamma: float, zeta: float, log_t: ArrayLike) -> Array:
    """log [k_{zeta,gamma}]*(t) at the given log t (the kernel is decreasing in rho)."""
    params = BGRParams(space, zeta, gamma)
    radii = volume_table(space).radius_log(np.asarray(log_t, dtype=float))
    return np.array([log_bgr_kernel(params, float(r)) for r in np.atleast_1d(radii)])


def rearranged_kernel_large_t(space: SpaceDescriptor, gamma: float, zeta: float = 0.0, log_t_range: tuple[float, float] = (60.0, 110.0), n: int = 10) -> PowerFit:
    """Fit [k]*(t) = C t^e (ln t)^L for large t, with L = gamma - 2 (zeta = 0) or (gamma - 2)/2."""
    lt = np.linspace(*log_t_range, n)
    power = gamma - 2 if zeta == 0 else (gamma - 2) / 2
    return _fit(lt, rearranged_kernel(space, gamma, zeta, lt), power)


def rearranged_kernel_small_t(space: SpaceDescriptor, gamma: float, zeta: float = 0.0, t_range: tuple[float, float] = (1e-12, 1e-9), n: int = 8) -> PowerFit:
    """Fit [k]*(t) = C t^e for small t."""
    lt = np.linspace(math.log(t_range[0]), math.log(t_range[1]), n)
    return _fit(lt, rearranged_kernel(space, gamma, zeta, lt), 0.0)


def small_t_prediction(space: SpaceDescriptor, gamma: float) -> tuple[float, float]:
    """Exponent (gamma - N)/N and coefficient (1/gamma_N(gamma)) (N/omega_{N-1})^{(gamma-N)/N}."""
    N = space.N
    gN = riesz_constant(N, gamma).value
    e = (gamma - N) / N
    return e, (N / sphere_area(N - 1)) ** e / gN


def tail_square_integral(space: SpaceDescriptor, alpha: float, zeta: float, beta: float, c: float = 1.0, n_radii: int = 14) -> float:
    """int_c^infty |[k_alpha * k_{zeta,beta}]*(t)|^2 dt by radial quadrature.

    The convolution is evaluated by the quadrature backend on a grid of radii
    past R(c), assumed nonincreasing there, and splined in log form.
    """
    vt = volume_table(space)
    R = float(vt.radius(c))
    ka, kb = bgr_profile(BGRParams(space, 0.0, alpha)), bgr_profile(BGRParams(space, zeta, beta))
    radii = np.linspace(R, R + 10.0, n_radii)
    u = np.array([radial_convolve(space, ka, kb, float(r), method="quad").value for r in radii])
    if np.any(np.diff(u) > 0):
        raise ValueError("convolution is not decreasing on the probed range")
    logu = PchipInterpolator(radii, np.log(u))
    slope = float((np.log(u[-1]) - np.log(u[-2])) / (radii[-1] - radii[-2]))
    val, _ = integrate.quad(lambda r: math.exp(2 * float(logu(r)) + float(log_density(space, r))), R, radii[-1], limit=200)
    tail_rate = 2 * slope + space.Q
    if tail_rate >= 0:
        return math.inf
    val += math.exp(2 * math.log(u[-1]) + float(log_density(space, radii[-1]))) / (-tail_rate)
    return val


__all__ = [
    "VolumeTable",
    "volume_table",
    "superlevel_intervals",
    "distribution_function",
    "decreasing_rearrangement",
    "RearrangedFunction",
    "double_star",
    "lorentz_norm",
    "lorentz_norm_star",
    "EquimeasurabilityReport",
    "equimeasurability_check",
    "shipped_profiles",
    "ONeilReport",
    "tabulated_profile",
    "oneil_check",
    "PowerFit",
    "rearranged_kernel",
    "rearranged_kernel_large_t",
    "rearranged_kernel_small_t",
    "small_t_prediction",
    "tail_square_integral",
]
