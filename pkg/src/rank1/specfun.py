"""Special functions used by the closed-form constants.

Floating-point evaluation leans on the standard library, scipy and mpmath;
the exact twins (Pochhammer, Jacobi) work over ``fractions.Fraction`` so the
symbolic engine can consume them without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath
from scipy import special


class DomainError(ValueError):
    """Raised when an argument falls outside the domain of a function."""


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


@dataclass(frozen=True)
class HypergeometricParams:
    upper: tuple[float, ...]
    lower: tuple[float, ...]
    argument: float

    def __post_init__(self) -> None:
        for b in self.lower:
            if _is_nonpositive_integer(b):
                raise DomainError(f"lower parameter {b} is a nonpositive integer")
        if self.argument == 1 and len(self.upper) == 3 and len(self.lower) == 2:
            if sum(self.lower) - sum(self.upper) <= 0:
                raise DomainError("3F2 at 1 diverges: sum(lower) - sum(upper) <= 0")


@dataclass(frozen=True)
class RieszConstant:
    k: int
    gamma: float
    value: float


def gamma(x: float) -> float:
    """Euler's Gamma function on the real line (poles raise ``DomainError``)."""
    if _is_nonpositive_integer(x):
        raise DomainError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def pochhammer(a: Fraction | int, k: int) -> Fraction:
    """Rising factorial (a)_k in exact arithmetic."""
    a = Fraction(a)
    out = Fraction(1)
    for i in range(k):
        out *= a + i
    return out


def hyp2f1(a: float, b: float, c: float, x: float) -> float:
    """Gauss hypergeometric function on [0, 1).

    Evaluation is symmetric in (a, b) by construction: the upper pair is
    sorted before the call so that swapped arguments hit the same code path.
    """
    if _is_nonpositive_integer(c):
        raise DomainError(f"c = {c} is a pole of 2F1")
    if not 0.0 <= x < 1.0:
        raise DomainError(f"argument {x} outside [0, 1)")
    a, b = sorted((float(a), float(b)))
    if x == 0.0:
        return 1.0
    return float(special.hyp2f1(a, b, c, x))


def hyp3f2_at_1(a1: float, a2: float, a3: float, b1: float, b2: float) -> float:
    """Generalized hypergeometric 3F2 evaluated at unit argument."""
    HypergeometricParams((a1, a2, a3), (b1, b2), 1)
    if a1 == 0 or a2 == 0 or a3 == 0:
        return 1.0
    return float(mpmath.hyp3f2(a1, a2, a3, b1, b2, 1))


def jacobi_p(k: int, alpha: float, beta: float, t: float) -> float:
    """Jacobi polynomial P_k^(alpha, beta)(t) in floating point."""
    if k < 0:
        raise DomainError("degree must be nonnegative")
    return float(special.eval_jacobi(k, alpha, beta, t))


def jacobi_p_exact(k: int, alpha: Fraction | int, beta: Fraction | int, t: Fraction | int) -> Fraction:
    """Exact Jacobi polynomial by the standard three-term recurrence."""
    a, b, x = Fraction(alpha), Fraction(beta), Fraction(t)
    p_prev = Fraction(1)
    if k == 0:
        return p_prev
    p = (a + 1) + (a + b + 2) * (x - 1) / 2
    for n in range(2, k + 1):
        s = 2 * n + a + b
        c1 = 2 * n * (n + a + b) * (s - 2)
        c2 = (s - 1) * (s * (s - 2) * x + a * a - b * b)
        c3 = 2 * (n + a - 1) * (n + b - 1) * s
        p_prev, p = p, (c2 * p - c3 * p_prev) / c1
    return p


def riesz_constant(k: int, g: float) -> RieszConstant:
    """gamma_k(g) = pi^(k/2) 2^g Gamma(g/2) / Gamma((k-g)/2)."""
    if not 0 < g < k:
        raise DomainError(f"order {g} outside (0, {k})")
    value = math.pi ** (k / 2) * 2.0**g * math.gamma(g / 2) / math.gamma((k - g) / 2)
    return RieszConstant(k, g, value)


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere S^d in R^(d+1)."""
    if d < 1:
        raise DomainError("sphere dimension must be >= 1")
    return 2 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


def adams_constant(alpha: float, n: int) -> float:
    """Sharp Adams exponent beta_0(alpha, n) with p' = n/(n - alpha)."""
    if not 0 < alpha < n:
        raise DomainError(f"alpha = {alpha} outside (0, {n})")
    p_dual = n / (n - alpha)
    return n / sphere_area(n - 1) * riesz_constant(n, alpha).value ** p_dual


__all__ = [
    "DomainError",
    "HypergeometricParams",
    "RieszConstant",
    "gamma",
    "pochhammer",
    "hyp2f1",
    "hyp3f2_at_1",
    "jacobi_p",
    "jacobi_p_exact",
    "riesz_constant",
    "sphere_area",
    "adams_constant",
]
