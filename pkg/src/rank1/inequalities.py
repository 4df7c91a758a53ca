"""Numerical probes of the Poincare-Sobolev, Hardy-Sobolev-Maz'ya and Adams inequalities.

The inequalities are probed through computable ingredients of their proofs:
the polynomial minorant that fixes delta, the dual convolution form
||k_gamma * k_{zeta,gamma'} * f||_{p'} / ||f||_p, exponential integrals of
Adams type and the L^2 spectral gap of -Delta.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import optimize, special
from scipy.interpolate import CubicSpline, PchipInterpolator

from .ball_geometry import RadialProfile, SpaceDescriptor, radial_laplacian
from .kernels import _mellin_nodes, log_density, log_shifted_heat_kernel, radial_convolve
from .rearrangement import _radial_integral

Array = NDArray[np.float64]


# --- minorant ---------------------------------------------------------------------


@dataclass(frozen=True)
class MinorantResult:
    """delta for prod(l^2 + c_j^2) - prod c_j^2 >= l^2 (l^2 + delta)^{k-1} on a grid.

    ``delta`` is None when k = 1 (both sides equal l^2 and delta is
    unconstrained).  ``margin`` is the smallest relative slack on the grid.
    """

    k: int
    a: float
    delta: float | None
    c_values: tuple[float, ...]
    lam: Array = field(repr=False)
    margin: float

    @property
    def unconstrained(self) -> bool:
        return self.delta is None

    def certify(self) -> bool:
        if self.delta is None:
            return True
        return bool(np.all(_slack(self.lam, self.c_values, self.k, self.delta) >= 0))


def _gap(lam: Array, c: Sequence[float]) -> Array:
    l2 = lam * lam
    return np.prod([l2 + ci * ci for ci in c], axis=0) - math.prod(ci * ci for ci in c)


def _slack(lam: Array, c: Sequence[float], k: int, delta: float) -> Array:
    """gap - rhs, with rounding slack of a few ulps of the gap."""
    g = _gap(lam, c)
    rhs = lam * lam * (lam * lam + delta) ** (k - 1)
    return g - rhs + 1e-13 * np.abs(g)


def minorant_delta(k: int, a: float, lam_max: float = 50.0, n: int = 10_000, tol: float = 1e-13) -> MinorantResult:
    """Largest delta (by bisection) for which the minorant holds on a lambda-grid."""
    if k < 1:
        raise ValueError("k >= 1")
    c = tuple(float(a - k + 2 * j - 2) for j in range(1, k + 1))
    lam = np.linspace(0.0, lam_max, n)
    if k == 1:
        return MinorantResult(k, a, None, c, lam, 0.0)
    ok = lambda d: bool(np.all(_slack(lam, c, k, d) >= 0))  # noqa: E731
    lo, hi = 0.0, 1.0
    if not ok(lo):
        return MinorantResult(k, a, 0.0, c, lam, float(np.min(_slack(lam, c, k, 0.0))))
    while ok(hi):
        lo, hi = hi, 2 * hi
        if hi > 1e12:
            break
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    g = _gap(lam, c)
    rel = (g - lam * lam * (lam * lam + lo) ** (k - 1))[1:] / np.maximum(g[1:], 1e-300)
    return MinorantResult(k, a, lo, c, lam, float(np.min(rel)))


# --- the Phi_p function and Adams integrals ---------------------------------------------


def phi_p(p: float, t: float | Array) -> float | Array:
    """e^t - sum_{j=0}^{j_p-2} t^j / j!, j_p the least integer >= p.

    The tail of the exponential series equals e^t P(j_p - 1, t), with P the
    regularized lower incomplete gamma function; this keeps small t exact.
    """
    if not p > 1:
        raise ValueError("p must exceed 1")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    jp = math.ceil(p)
    out = np.exp(t_arr) * special.gammainc(jp - 1, t_arr)
    return float(out) if np.ndim(t) == 0 else out


def _expm1_minus(x: Array) -> Array:
    """e^x - 1 - x without cancellation."""
    small = np.abs(x) < 1e-3
    series = x * x * (0.5 + x * (1 / 6 + x / 24))
    with np.errstate(over="ignore"):
        return np.where(small, series, np.expm1(x) - x)


def adams_integral(space: SpaceDescriptor, beta: float, u: RadialProfile, r_max: float = 60.0) -> float:
    """int (e^{beta u^2} - 1 - beta u^2) dV; +inf when it diverges numerically."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    hi = u.support if math.isfinite(u.support) else r_max
    fn = lambda r: _expm1_minus(beta * np.asarray(u(r)) ** 2)  # noqa: E731
    with np.errstate(over="ignore"):
        if not math.isfinite(u.support):
            edge = float(fn(np.array([hi]))[0]) * math.exp(float(log_density(space, hi)))
            if not edge < 1e-12:
                return math.inf
        val = _radial_integral(space, fn, 0.0, hi)
    return val if math.isfinite(val) else math.inf


# --- spectral gap ------------------------------------------------------------------------


def spectral_gap_probe(space: SpaceDescriptor, u: RadialProfile, r_max: float = 40.0, n: int = 1600) -> float:
    """<u, (-Delta - Q^2/4) u> by radial quadrature of -u Delta u - rho_X^2 u^2."""
    hi = u.support if math.isfinite(u.support) else r_max
    x, w = np.polynomial.legendre.leggauss(n)
    r = 0.5 * hi * (x + 1)
    w = 0.5 * hi * w
    vals = np.asarray(u(r), dtype=float)
    if not np.any(vals):
        return 0.0
    lap = np.array([radial_laplacian(space, u, float(ri), h=min(1e-4, 0.25 * (hi - ri) + 1e-9)) for ri in r])
    term = -vals * lap - space.spectral_gap * vals * vals
    with np.errstate(divide="ignore"):
        scaled = np.sign(term) * np.exp(np.log(np.abs(term)) + log_density(space, r))
    return float(np.sum(w * scaled))


# --- dual form of the Sobolev inequality ---------------------------------------------------


@dataclass(frozen=True)
class DualSobolevParams:
    """gamma in (0, 3), gamma' in (0, N - gamma), zeta > 0, p in [2N/(N+gamma+gamma'), 2)."""

    gamma: float
    gamma2: float
    zeta: float
    p: float

    def validate(self, space: SpaceDescriptor) -> None:
        N = space.N
        if not 0 < self.gamma < 3:
            raise ValueError("gamma must lie in (0, 3)")
        if not 0 < self.gamma2 < N - self.gamma:
            raise ValueError("gamma' must lie in (0, N - gamma)")
        if not self.zeta > 0:
            raise ValueError("zeta must be positive")
        if not 2 * N / (N + self.gamma + self.gamma2) <= self.p < 2:
            raise ValueError("p outside [2N/(N+gamma+gamma'), 2)")

    @property
    def p_dual(self) -> float:
        return self.p / (self.p - 1)


def log_composite_kernel(space: SpaceDescriptor, gamma: float, gamma2: float, zeta: float, rho: float) -> float:
    """log of the kernel of k_gamma * k_{zeta,gamma'} at distance rho.

    The two Mellin integrals merge into one with weight
    w(t) = t^{c-1} 1F1(gamma'/2; c; -zeta^2 t) / Gamma(c), c = (gamma + gamma')/2,
    against the shifted heat kernel.  Past t_hi the weight behaves like
    t^{gamma/2-1} zeta^{-gamma'} / Gamma(gamma/2) and the heat kernel like
    C t^{-3/2} + D t^{-5/2}; that tail is added in closed form.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    c = 0.5 * (gamma + gamma2)
    x_lo = math.log(rho * rho) - 9.0
    x_hi = math.log(1e7 * (1.0 + rho * rho))
    x, w = _mellin_nodes(x_lo, x_hi)
    t = np.exp(x)
    logs = log_shifted_heat_kernel(space, t, rho)
    logw = (c - 1) * x + np.log(special.hyp1f1(0.5 * gamma2, c, -zeta * zeta * t)) - math.lgamma(c)
    logf = x + logw + logs
    peak = float(np.max(logf))
    total = float(np.sum(np.exp(logf - peak) * w))
    j = int(np.searchsorted(x, x[-1] - 2.0))
    g1 = math.exp(logs[j] + 1.5 * x[j] - peak)
    g2 = math.exp(logs[-1] + 1.5 * x[-1] - peak)
    t1, t2 = t[j], t[-1]
    d = (g1 - g2) / (1 / t1 - 1 / t2)
    cc = g2 - d / t2
    pref = zeta ** (-gamma2) / math.gamma(gamma / 2)
    hg = gamma / 2
    total += pref * (cc * t2 ** (hg - 1.5) / (1.5 - hg) + d * t2 ** (hg - 2.5) / (2.5 - hg))
    return peak + math.log(total)


@lru_cache(maxsize=8)
def composite_profile(space: SpaceDescriptor, gamma: float, gamma2: float, zeta: float, rmax: float = 12.0, n: int = 64) -> RadialProfile:
    """Spline of log(k_gamma * k_{zeta,gamma'}) with power-law and exponential continuations."""
    lo = 1e-4
    grid = np.unique(np.concatenate([np.geomspace(lo, 1.0, n // 2), np.linspace(1.0, rmax, n // 2)]))
    logk = np.array([log_composite_kernel(space, gamma, gamma2, zeta, float(r)) for r in grid])
    spline = CubicSpline(np.log(grid), logk)
    slope_lo = gamma + gamma2 - space.N
    rate = space.Q / 2
    tail_slope = float(spline(math.log(rmax), 1)) / rmax

    def f(rho: Array) -> Array:
        rho = np.asarray(rho, dtype=float)
        out = spline(np.log(np.clip(rho, lo, rmax)))
        with np.errstate(divide="ignore"):
            out = np.where(rho < lo, logk[0] + slope_lo * (np.log(np.maximum(rho, 1e-300)) - math.log(lo)), out)
        out = np.where(rho > rmax, logk[-1] + tail_slope * (rho - rmax), out)
        return np.exp(out)

    return RadialProfile(f, decay_rate=rate, decay_power=gamma - 2, name=f"k[{gamma}]*k[{zeta},{gamma2}]")


def radial_lp_norm(space: SpaceDescriptor, f: RadialProfile, p: float, r_max: float = 60.0) -> float:
    hi = f.support if math.isfinite(f.support) else r_max
    return _radial_integral(space, lambda r: np.abs(f(r)) ** p, 0.0, hi) ** (1 / p)


def _tail_integral(space: SpaceDescriptor, log_u: Callable[[float], float], q: float, start: float, slope: float) -> float:
    """int_start^inf |u|^q dV for u ~ e^{log_u(start) + slope (r - start)} beyond start."""
    rate = -(q * slope) - space.Q
    if rate <= 0:
        return math.inf
    # density ~ (omega / 2^{p+q}) e^{Q r}; use the exact log density at start
    base = q * log_u(start) + float(log_density(space, start))
    return math.exp(base) / rate


@dataclass(frozen=True)
class DualSobolevResult:
    ratio: float
    numerator: float
    denominator: float
    radii: Array = field(repr=False)
    values: Array = field(repr=False)


def dual_sobolev_ratio(
    space: SpaceDescriptor,
    params: DualSobolevParams,
    f: RadialProfile,
    method: str = "quad",
    samples: int = 200_000,
    seed: int = 0,
    n_radii: int = 14,
    kernel: RadialProfile | None = None,
) -> DualSobolevResult:
    """||k_gamma * k_{zeta,gamma'} * f||_{p'} / ||f||_p for a compactly supported radial f.

    u = K * f is evaluated with ``radial_convolve`` on a radial grid up to
    supp f + 6; beyond the grid u is continued as u(R) K(r) / K(R), the
    profile of K itself.  Pass ``kernel`` to reuse a tabulated K.
    """
    params.validate(space)
    if not math.isfinite(f.support):
        raise ValueError("f must have compact support")
    K = kernel or composite_profile(space, params.gamma, params.gamma2, params.zeta)
    R = f.support + 6.0
    radii = np.concatenate([[0.0], np.geomspace(0.05, R, n_radii - 1)])
    rng = np.random.default_rng(seed)
    vals = np.array([radial_convolve(space, K, f, float(r), method=method, samples=samples, seed=rng).value for r in radii])
    if np.any(vals <= 0):
        raise ValueError("convolution not positive on the grid; f must be nonnegative")
    q = params.p_dual
    log_interp = PchipInterpolator(radii, np.log(vals))
    log_k_R = math.log(float(K(np.array([R]))[0]))
    inner = _radial_integral(space, lambda r: np.exp(q * log_interp(np.clip(r, 0.0, R))), 0.0, R)
    shift = math.log(vals[-1]) - log_k_R
    r_far = 60.0
    mid = _radial_integral(space, lambda r: np.exp(q * (np.log(K(r)) + shift)), R, r_far)
    slope = float(np.log(K(np.array([r_far + 1.0]))[0]) - np.log(K(np.array([r_far]))[0]))
    far = _tail_integral(space, lambda r: math.log(float(K(np.array([r]))[0])) + shift, q, r_far, slope)
    num = (inner + mid + far) ** (1 / q)
    den = radial_lp_norm(space, f, params.p)
    return DualSobolevResult(num / den, num, den, radii, vals)


# --- trial families and the search ----------------------------------------------------------


@dataclass(frozen=True)
class TrialFamily:
    """Radial profiles u_theta with theta in the box [lower, upper]."""

    name: str
    builder: Callable[[Array], RadialProfile]
    lower: tuple[float, ...] = ()
    upper: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(self.lower) != len(self.upper) or any(a > b for a, b in zip(self.lower, self.upper)):
            raise ValueError("invalid parameter box")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def member(self, theta: Sequence[float]) -> RadialProfile:
        th = np.clip(np.asarray(theta, dtype=float), self.lower, self.upper) if self.dim else np.zeros(0)
        return self.builder(th)


def bump_family(max_radius: float = 2.0) -> TrialFamily:
    """(1 - (r/s)^2)_+^k with s in [0.2, max_radius] and k in [3, 8]."""

    def build(th: Array) -> RadialProfile:
        s, k = float(th[0]), float(th[1])
        return RadialProfile(lambda r: np.clip(1 - (r / s) ** 2, 0.0, None) ** k, support=s, name=f"bump[{s:.4g},{k:.4g}]")

    return TrialFamily("bump", build, (0.2, 3.0), (max_radius, 8.0))


def fixed_family(profile: RadialProfile) -> TrialFamily:
    """A one-member family."""
    return TrialFamily(f"fixed:{profile.name}", lambda th: profile)


@dataclass(frozen=True)
class SearchResult:
    sup_ratio: float
    family: str
    theta: tuple[float, ...]
    evaluations: int


class _Budget(Exception):
    pass


def rayleigh_search(
    space: SpaceDescriptor,
    params: DualSobolevParams,
    families: TrialFamily | Sequence[TrialFamily],
    budget: int = 12,
    seed: int = 0,
    method: str = "mc",
    samples: int = 100_000,
) -> SearchResult:
    """Maximise dual_sobolev_ratio over each family with a Nelder-Mead simplex, then over families.

    Each family gets ``budget`` evaluations and a start point drawn from a
    generator keyed by (seed, crc32(name)), so adding families never changes
    the search inside the others and the reported supremum cannot decrease.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    fams = [families] if isinstance(families, TrialFamily) else list(families)
    params.validate(space)
    K = composite_profile(space, params.gamma, params.gamma2, params.zeta)
    best = SearchResult(-math.inf, "", (), 0)
    total = 0
    for fam in fams:
        evals: list[tuple[float, tuple[float, ...]]] = []

        def objective(theta: Array) -> float:
            if len(evals) >= budget:
                raise _Budget
            th = tuple(float(v) for v in np.clip(theta, fam.lower, fam.upper)) if fam.dim else ()
            r = dual_sobolev_ratio(space, params, fam.member(th), method=method, samples=samples, seed=seed, kernel=K).ratio
            evals.append((r, th))
            return -r

        if fam.dim == 0:
            objective(np.zeros(0))
        else:
            rng = np.random.default_rng([seed, zlib.crc32(fam.name.encode())])
            lo, up = np.array(fam.lower), np.array(fam.upper)
            x0 = lo + (up - lo) * rng.uniform(0.25, 0.75, fam.dim)
            try:
                optimize.minimize(objective, x0, method="Nelder-Mead", options={"maxfev": budget, "xatol": 1e-4, "fatol": 1e-8})
            except _Budget:
                pass
        total += len(evals)
        r, th = max(evals, key=lambda e: e[0])
        if r > best.sup_ratio:
            best = SearchResult(r, fam.name, th, 0)
    return SearchResult(best.sup_ratio, best.family, best.theta, total)


def adams_divergence_trend(space: SpaceDescriptor, u: RadialProfile, beta: float, amplitudes: Sequence[float]) -> Array:
    """adams_integral of (A u) for increasing amplitudes A, to display blow-up."""
    return np.array([adams_integral(space, beta, RadialProfile(lambda r, a=a: a * u(r), support=u.support)) for a in amplitudes])


__all__ = [
    "MinorantResult",
    "minorant_delta",
    "phi_p",
    "adams_integral",
    "adams_divergence_trend",
    "spectral_gap_probe",
    "DualSobolevParams",
    "DualSobolevResult",
    "log_composite_kernel",
    "composite_profile",
    "radial_lp_norm",
    "dual_sobolev_ratio",
    "TrialFamily",
    "bump_family",
    "fixed_family",
    "SearchResult",
    "rayleigh_search",
]
