"""Eigenvalues of zonal integral operators on quaternionic and octonionic spheres.

Kernels are restricted to the class K(q) = kappa(|q|, Re q) on the unit ball of
Q (or Ca).  For such kernels the inner sphere integral collapses to a single
angle phi with Re u = cos(phi), and the outer one to theta in [0, pi/2].  The
theta integral is done by Gauss-Jacobi in t = cos(2 theta), the phi integral
by Gauss-Legendre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from numpy.typing import NDArray
from scipy import special

from .ball_geometry import sample_sphere
from .specfun import DomainError, hyp2f1, jacobi_p, sphere_area

Array = NDArray[np.float64]


@dataclass(frozen=True)
class ZonalKernel:
    """K(q) = kappa(|q|, Re q), vectorised over numpy arrays."""

    kappa: Callable[[Array, Array], Array]
    name: str = "K"

    def __call__(self, modulus: Array, re_part: Array) -> Array:
        return np.asarray(self.kappa(modulus, re_part), dtype=float)

    @classmethod
    def constant(cls, c: float = 1.0) -> "ZonalKernel":
        return cls(lambda s, x: np.full(np.broadcast(s, x).shape, float(c)), name=f"const({c})")

    @classmethod
    def poisson(cls, alpha: float, r: float) -> "ZonalKernel":
        """|1 - r q|^{-2 alpha} = (1 - 2 r Re q + r^2 |q|^2)^{-alpha}."""
        return cls(lambda s, x: (1 - 2 * r * x + r * r * s * s) ** (-alpha), name=f"poisson({alpha}, {r})")

    def __add__(self, other: "ZonalKernel") -> "ZonalKernel":
        return ZonalKernel(lambda s, x: self(s, x) + other(s, x), name=f"{self.name}+{other.name}")

    def scale(self, a: float) -> "ZonalKernel":
        return ZonalKernel(lambda s, x: a * self(s, x), name=f"{a}*{self.name}")


@dataclass(frozen=True)
class BisphericalIndex:
    j: int
    k: int

    def __post_init__(self) -> None:
        if not (isinstance(self.j, int) and isinstance(self.k, int)):
            raise TypeError("indices must be integers")
        if not self.j >= self.k >= 0:
            raise ValueError(f"need j >= k >= 0, got ({self.j}, {self.k})")

    @property
    def ell(self) -> int:
        return self.j - self.k


def _theta_rule(a: int, b: int, n: int) -> tuple[Array, Array, Array]:
    """Nodes (t, cos theta) and weights for int_0^{pi/2} sin^a cos^b (.) d theta."""
    # sin^a cos^b d theta = 1/4 ((1-t)/2)^{(a-1)/2} ((1+t)/2)^{(b-1)/2} dt, t = cos 2 theta
    t, w = special.roots_jacobi(n, (a - 1) / 2, (b - 1) / 2)
    w = w * 0.25 * 2.0 ** (-(a + b - 2) / 2)
    return t, np.sqrt((1 + t) / 2), w


def _phi_rule(n: int) -> tuple[Array, Array]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * math.pi * (x + 1), 0.5 * math.pi * w


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise ValueError(f"{what}: kernel is not integrable against the Funk-Hecke weights")
    return value


def eigenvalue_quaternionic(idx: BisphericalIndex, n: int, K: ZonalKernel, n_theta: int = 96, n_phi: int = 128) -> float:
    """lambda_{j,k}(K) for the operator with kernel K(<zeta, eta>_Q) on S^{4n+3}.

    On S^3 the measure is du = 4 pi sin^2(phi) d phi and the zonal factor is
    sin((l+1) phi) / sin(phi) with l = j - k.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    j, k, ell = idx.j, idx.k, idx.ell
    pref = 2 * math.pi ** (2 * n) * math.factorial(k) / (math.factorial(ell + 1) * math.factorial(k + 2 * n - 1))
    t, c, wt = _theta_rule(4 * n - 1, ell + 3, n_theta)
    jac = np.array([jacobi_p(k, 2 * n - 1, ell + 1, ti) for ti in t])
    phi, wp = _phi_rule(n_phi)
    ang = 4 * math.pi * np.sin(phi) * np.sin((ell + 1) * phi)
    with np.errstate(all="ignore"):
        inner = K(c[:, None] * np.ones_like(phi), c[:, None] * np.cos(phi)) @ (wp * ang)
    return _finite(pref * float(np.sum(wt * jac * inner)), "eigenvalue_quaternionic")


def ajk_coefficients(idx: BisphericalIndex) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Exact coefficients (a0, a1, a2, a3) of the octonionic cosine combination."""
    d = idx.ell
    f = lambda s: Fraction(1, d + s)  # noqa: E731
    a0 = Fraction(1, 8) * f(3) - Fraction(1, 4) * f(2) + Fraction(1, 8) * f(1)
    a1 = Fraction(3, 8) * f(3) - Fraction(1, 4) * f(4) - Fraction(1, 8) * f(1)
    a2 = -Fraction(3, 8) * f(3) + Fraction(1, 4) * f(2) + Fraction(1, 8) * f(5)
    a3 = -Fraction(1, 8) * f(3) + Fraction(1, 4) * f(4) - Fraction(1, 8) * f(5)
    return a0, a1, a2, a3


def eigenvalue_octonionic(idx: BisphericalIndex, K: ZonalKernel, n_theta: int = 96, n_phi: int = 128) -> float:
    """lambda_{j,k}(K) for the operator with kernel K(Psi_Ca) on S^15.

    The cosine combination already carries the sin^6(phi) density of Re u on
    S^7, so the u-integral is |S^6| times a plain d phi integral over [0, pi].
    """
    j, k, ell = idx.j, idx.k, idx.ell
    pref = 15 * math.pi**4 * math.factorial(k) / math.factorial(k + 3)
    t, c, wt = _theta_rule(7, ell + 7, n_theta)
    jac = np.array([jacobi_p(k, 3, 3 + ell, ti) for ti in t])
    phi, wp = _phi_rule(n_phi)
    a = [float(x) for x in ajk_coefficients(idx)]
    comb = sum(a[i] * np.cos((ell + 2 * i) * phi) for i in range(4))
    with np.errstate(all="ignore"):
        inner = K(c[:, None] * np.ones_like(phi), c[:, None] * np.cos(phi)) @ (wp * comb)
    return _finite(pref * sphere_area(6) * float(np.sum(wt * jac * inner)), "eigenvalue_octonionic")


def _check_poisson(alpha: float, r: float) -> None:
    if not alpha > -0.5:
        raise DomainError(f"alpha = {alpha} must exceed -1/2")
    if not 0 <= r < 1:
        raise DomainError(f"r = {r} outside [0, 1)")


def poisson_eigen_q(alpha: float, r: float, n: int) -> float:
    """int_{S^{4n+3}} |1 - <r xi, zeta>_Q|^{-2 alpha} d sigma in closed form."""
    _check_poisson(alpha, r)
    return 2 * math.pi ** (2 * n + 2) / math.factorial(2 * n + 1) * hyp2f1(alpha, alpha - 1, 2 * n + 2, r * r)


def poisson_eigen_ca(alpha: float, r: float) -> float:
    """int_{S^15} Psi_Ca(r xi, zeta)^{-alpha} d sigma in closed form."""
    _check_poisson(alpha, r)
    return 2 * math.pi**8 / math.factorial(7) * hyp2f1(alpha, alpha - 3, 8, r * r)


def mc_zonal_integral(
    sphere_dim: int,
    integrand: Callable[[Array], Array],
    samples: int = 1_000_000,
    seed: int | np.random.Generator = 0,
    chunk: int = 250_000,
) -> tuple[float, float]:
    """Plain Monte Carlo of int_{S^d} F d sigma; ``integrand`` maps (n, d+1) points to values."""
    if samples < 1000:
        raise ValueError("use at least 10^3 samples")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    s1 = s2 = 0.0
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        v = np.asarray(integrand(sample_sphere(sphere_dim + 1, rng, size=n)), dtype=float)
        s1 += float(v.sum())
        s2 += float(np.sum(v * v))
        done += n
    area = sphere_area(sphere_dim)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
    return area * mean, area * math.sqrt(var / samples)


__all__ = [
    "ZonalKernel",
    "BisphericalIndex",
    "eigenvalue_quaternionic",
    "ajk_coefficients",
    "eigenvalue_octonionic",
    "poisson_eigen_q",
    "poisson_eigen_ca",
    "mc_zonal_integral",
]
