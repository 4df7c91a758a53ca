"""Exact operator algebra for the factorization identities.

Two engines share one idea: every identity is checked as an exact polynomial
identity over the rationals, so a residual is either literally zero or not.

Radial (Damek-Ricci) engine
    Operators sum c * rho^p d^i with Laurent powers of rho.  Delta_Z and L_0
    commute with rho, d and each other, so they enter as commuting symbols.
    The symbol xi stands for sqrt(-Delta_Z), so Delta_Z = -xi^2; a Gaussian
    backend over Q(i) is available for imaginary multiples.  Conjugation by
    rho^s with symbolic s is exact because rho^s d rho^{-s} = d - s / rho.

Ball engine
    Functions (1 - |z|^2)^e * P(z, zbar) with e affine in the parameters and
    P a polynomial in z_1..z_{2m}, zbar_1..zbar_{2m}.  Wirtinger derivatives
    act on z and zbar as independent variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations_with_replacement
from math import comb
from typing import Callable, Iterable

from sympy.polys.domains import QQ, QQ_I
from sympy.polys.rings import PolyElement, PolyRing, ring

# --- parameter field ---------------------------------------------------------

_SCALAR_NAMES = ("a", "Q", "xi", "ell", "beta", "sigma", "s", "alpha", "k")


@dataclass(frozen=True)
class ParamField:
    """Polynomial ring over Q (``pairing``) or Q(i) (``gaussian``) in the named scalars.

    Delta_Z maps to -xi^2 and sqrt(-Delta_Z) to xi; L_0 maps to ell.  Only the
    Gaussian backend can represent an imaginary multiple of sqrt(-Delta_Z).
    """

    backend: str = "pairing"
    ring: PolyRing = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.backend not in ("pairing", "gaussian"):
            raise ValueError(f"unknown backend {self.backend!r}")
        dom = QQ if self.backend == "pairing" else QQ_I
        object.__setattr__(self, "ring", ring(",".join(_SCALAR_NAMES), dom)[0])

    def __getattr__(self, name: str) -> PolyElement:
        if name in _SCALAR_NAMES:
            return self.ring.gens[_SCALAR_NAMES.index(name)]
        raise AttributeError(name)

    @property
    def delta_z(self) -> PolyElement:
        return -self.xi**2

    @property
    def lap0(self) -> PolyElement:
        return self.ell

    def imag_unit(self) -> PolyElement:
        if self.backend != "gaussian":
            raise ValueError("the pairing backend has no imaginary unit")
        return self.ring(self.ring.domain(0, 1))


# --- differential operators in rho -------------------------------------------

Key = tuple[int, int]  # (order of d, power of rho)


def _falling(p: int, t: int) -> int:
    out = 1
    for i in range(t):
        out *= p - i
    return out


@dataclass(frozen=True)
class DiffOperator:
    """sum_{(i, p)} c_{i,p} rho^p d^i with coefficients in a :class:`ParamField`."""

    field: ParamField
    terms: dict[Key, PolyElement]

    @classmethod
    def zero(cls, F: ParamField) -> "DiffOperator":
        return cls(F, {})

    @classmethod
    def scalar(cls, F: ParamField, c) -> "DiffOperator":
        c = F.ring(c)
        return cls(F, {(0, 0): c} if c else {})

    @classmethod
    def rho(cls, F: ParamField, p: int = 1) -> "DiffOperator":
        return cls(F, {(0, p): F.ring(1)})

    @classmethod
    def d(cls, F: ParamField, i: int = 1) -> "DiffOperator":
        return cls(F, {(i, 0): F.ring(1)})

    def _clean(self, terms: dict[Key, PolyElement]) -> "DiffOperator":
        return DiffOperator(self.field, {k: v for k, v in terms.items() if v})

    def __add__(self, other) -> "DiffOperator":
        other = _lift(self.field, other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, self.field.ring(0)) + v
        return self._clean(out)

    __radd__ = __add__

    def __neg__(self) -> "DiffOperator":
        return DiffOperator(self.field, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other) -> "DiffOperator":
        return self + (-_lift(self.field, other))

    def __rsub__(self, other) -> "DiffOperator":
        return _lift(self.field, other) - self

    def __mul__(self, other) -> "DiffOperator":
        return op_compose(self, _lift(self.field, other))

    def __rmul__(self, other) -> "DiffOperator":
        return op_compose(_lift(self.field, other), self)

    def __pow__(self, n: int) -> "DiffOperator":
        return reduce(op_compose, [self] * n, DiffOperator.scalar(self.field, 1))

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (i, p), c in sorted(self.terms.items(), reverse=True):
            parts.append(f"({c})*rho^{p}*d^{i}")
        return " + ".join(parts)


def _lift(F: ParamField, x) -> DiffOperator:
    return x if isinstance(x, DiffOperator) else DiffOperator.scalar(F, x)


def op_compose(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    """Normal form of A o B using d^i rho^p = sum_t C(i,t) p^(t) rho^{p-t} d^{i-t}."""
    F = A.field
    out: dict[Key, PolyElement] = {}
    for (i1, p1), c1 in A.terms.items():
        for (i2, p2), c2 in B.terms.items():
            c12 = c1 * c2
            for t in range(i1 + 1):
                f = comb(i1, t) * _falling(p2, t)
                if f == 0:
                    continue
                key = (i1 - t + i2, p1 + p2 - t)
                out[key] = out.get(key, F.ring(0)) + c12 * f
    return DiffOperator(F, {k: v for k, v in out.items() if v})


def conjugate(A: DiffOperator, s: PolyElement) -> DiffOperator:
    """rho^s o A o rho^{-s} for symbolic s (each d becomes d - s/rho)."""
    F = A.field
    shifted_d = DiffOperator.d(F) - DiffOperator(F, {(0, -1): F.ring(s)})
    out = DiffOperator.zero(F)
    for (i, p), c in A.terms.items():
        out = out + DiffOperator(F, {(0, p): c}) * shifted_d**i
    return out


@dataclass(frozen=True)
class FormalRadial:
    """rho^sigma * sum_p c_p rho^p with symbolic sigma."""

    field: ParamField
    sigma: PolyElement
    coeffs: dict[int, PolyElement]

    def is_zero(self) -> bool:
        return not any(self.coeffs.values())

    def __sub__(self, other: "FormalRadial") -> "FormalRadial":
        if self.sigma != other.sigma:
            raise ValueError("exponents differ")
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, self.field.ring(0)) - c
        return FormalRadial(self.field, self.sigma, {p: c for p, c in out.items() if c})


def op_apply(A: DiffOperator, f: FormalRadial) -> FormalRadial:
    """Exact application; d rho^{sigma+p} = (sigma + p) rho^{sigma+p-1}."""
    F = A.field
    out: dict[int, PolyElement] = {}
    for (i, q), c in A.terms.items():
        for p, cp in f.coeffs.items():
            fac = F.ring(1)
            for t in range(i):
                fac *= f.sigma + (p - t)
            key = p - i + q
            out[key] = out.get(key, F.ring(0)) + c * cp * fac
    return FormalRadial(F, f.sigma, {p: c for p, c in out.items() if c})


# --- named radial operators ---------------------------------------------------


def L_op(F: ParamField, c) -> DiffOperator:
    """rho d^2 + c d + rho Delta_Z + L_0."""
    rho, d = DiffOperator.rho(F), DiffOperator.d(F)
    return rho * d**2 + d * F.ring(c) + rho * F.delta_z + F.lap0


def ds_laplacian_bracket(F: ParamField) -> DiffOperator:
    """rho [rho (d^2 + Delta_Z) + L_0 - (Q - 1) d], a quarter of the Laplace-Beltrami operator."""
    rho, d = DiffOperator.rho(F), DiffOperator.d(F)
    return rho * (rho * (d**2 + F.delta_z) + F.lap0 - d * (F.Q - 1))


@dataclass(frozen=True)
class Residual:
    """Outcome of one exact verification."""

    name: str
    is_zero: bool
    text: str

    def __bool__(self) -> bool:
        return self.is_zero


def _residual(name: str, lhs: DiffOperator, rhs: DiffOperator) -> Residual:
    r = lhs - rhs
    return Residual(name, r.is_zero(), r.to_text())


def _product(ops: Iterable[DiffOperator], F: ParamField) -> DiffOperator:
    return reduce(op_compose, ops, DiffOperator.scalar(F, 1))


# --- ball engine -------------------------------------------------------------


class BallAlgebra:
    """Polynomial ring Q[z_1..z_{2m}, zb_1..zb_{2m}, a, k, s] with the ball operators.

    Symbols a, k, s are exact parameters; alpha-subscripts of the Geller
    operators are ring elements affine in them.
    """

    def __init__(self, m: int):
        if m not in (1, 2):
            raise ValueError("the ball engine supports m = 1 or 2")
        self.m = m
        n = 2 * m
        names = [f"z{i}" for i in range(1, n + 1)] + [f"zb{i}" for i in range(1, n + 1)] + ["a", "k", "s"]
        self.ring = ring(",".join(names), QQ)[0]
        g = self.ring.gens
        self.z = g[:n]
        self.zb = g[n : 2 * n]
        self.a, self.k, self.s = g[2 * n :]
        self.w = 1 - sum(zi * zbi for zi, zbi in zip(self.z, self.zb))

    # basis ---------------------------------------------------------------
    def monomials(self, max_degree: int) -> list[PolyElement]:
        gens = list(self.z) + list(self.zb)
        out = [self.ring(1)]
        for deg in range(1, max_degree + 1):
            for combo in combinations_with_replacement(gens, deg):
                out.append(reduce(lambda x, y: x * y, combo))
        return out

    def fn(self, poly, exponent=0) -> "BallFunction":
        return BallFunction(self, self.ring(exponent), self.ring(poly))


@dataclass(frozen=True)
class BallFunction:
    """(1 - |z|^2)^exponent * poly."""

    alg: BallAlgebra
    exponent: PolyElement
    poly: PolyElement

    def normalized(self) -> "BallFunction":
        e, p = self.exponent, self.poly
        if not p:
            return self
        while True:
            q, r = p.div(self.alg.w)
            if r:
                return BallFunction(self.alg, e, p)
            e, p = e + 1, q

    def _align(self, other: "BallFunction") -> tuple[PolyElement, PolyElement, PolyElement]:
        shift = self.exponent - other.exponent
        if not shift.is_ground or int(shift.LC if shift else 0) != (shift.LC if shift else 0):
            raise ValueError("weights differ by a non-integer")
        n = int(shift.LC) if shift else 0
        w = self.alg.w
        if n >= 0:
            return other.exponent, self.poly * w**n, other.poly
        return self.exponent, self.poly, other.poly * w ** (-n)

    def __add__(self, other: "BallFunction") -> "BallFunction":
        if not other.poly:
            return self
        if not self.poly:
            return other
        e, p1, p2 = self._align(other)
        return BallFunction(self.alg, e, p1 + p2)

    def __sub__(self, other: "BallFunction") -> "BallFunction":
        return self + other.scale(-1)

    def scale(self, c) -> "BallFunction":
        return BallFunction(self.alg, self.exponent, self.poly * self.alg.ring(c))

    def times_w(self, n: int = 1) -> "BallFunction":
        return BallFunction(self.alg, self.exponent + n, self.poly)

    def is_zero(self) -> bool:
        return not self.poly

    def diff(self, var: PolyElement, conj_var: PolyElement) -> "BallFunction":
        """d/dvar of w^e P, with dw/dvar = -conj_var."""
        e, p = self.exponent, self.poly
        if not p:
            return self
        idx = self.alg.ring.gens.index(var)
        dp = p.diff(self.alg.ring.gens[idx])
        if not e:
            return BallFunction(self.alg, e, dp)
        return BallFunction(self.alg, e - 1, -e * conj_var * p + self.alg.w * dp)

    def dz(self, i: int) -> "BallFunction":
        return self.diff(self.alg.z[i], self.alg.zb[i])

    def dzb(self, i: int) -> "BallFunction":
        return self.diff(self.alg.zb[i], self.alg.z[i])

    def mul(self, c: PolyElement) -> "BallFunction":
        return BallFunction(self.alg, self.exponent, self.poly * c)

    def to_text(self) -> str:
        return f"(1-|z|^2)^({self.exponent}) * ({self.poly})"


BallOp = Callable[[BallFunction], BallFunction]


def _sum(fs: Iterable[BallFunction]) -> BallFunction:
    fs = list(fs)
    return reduce(lambda x, y: x + y, fs[1:], fs[0])


def ball_R(f: BallFunction) -> BallFunction:
    A = f.alg
    return _sum(f.dz(j).mul(A.z[j]) for j in range(2 * A.m)).normalized()


def ball_Rbar(f: BallFunction) -> BallFunction:
    A = f.alg
    return _sum(f.dzb(j).mul(A.zb[j]) for j in range(2 * A.m)).normalized()


def ball_D1(f: BallFunction) -> BallFunction:
    A, m = f.alg, f.alg.m
    return _sum(f.dz(m + j).mul(A.zb[j]) - f.dz(j).mul(A.zb[m + j]) for j in range(m)).normalized()


def ball_D1bar(f: BallFunction) -> BallFunction:
    A, m = f.alg, f.alg.m
    return _sum(f.dzb(m + j).mul(A.z[j]) - f.dzb(j).mul(A.z[m + j]) for j in range(m)).normalized()


def ball_Gamma(f: BallFunction) -> BallFunction:
    """(R - Rbar)^2 - 2 D1 D1bar - 2 D1bar D1."""
    def rm(g: BallFunction) -> BallFunction:
        return ball_R(g) - ball_Rbar(g)

    return (rm(rm(f)) - ball_D1(ball_D1bar(f)).scale(2) - ball_D1bar(ball_D1(f)).scale(2)).normalized()


def ball_euler(f: BallFunction) -> BallFunction:
    """R + Rbar."""
    return (ball_R(f) + ball_Rbar(f)).normalized()


def ball_geller_prime(alpha) -> BallOp:
    """Delta'_alpha = Delta'_0 + alpha (R + Rbar) - alpha (alpha + 1)."""

    def op(f: BallFunction) -> BallFunction:
        A = f.alg
        al = A.ring(alpha)
        z, zb, m = A.z, A.zb, A.m
        terms = []
        for i in range(m):
            for j in range(m):
                dij = 1 if i == j else 0
                fz_i, fz_mi = f.dz(i), f.dz(m + i)
                terms.append(fz_i.dzb(j).mul(dij - z[i] * zb[j] - zb[m + i] * z[m + j]))
                terms.append(fz_mi.dzb(j).mul(zb[i] * z[m + j] - z[m + i] * zb[j]))
                terms.append(fz_i.dzb(m + j).mul(zb[m + i] * z[j] - z[i] * zb[m + j]))
                terms.append(fz_mi.dzb(m + j).mul(dij - zb[i] * z[j] - z[m + i] * zb[m + j]))
        second = _sum(terms)
        return (second + ball_euler(f).scale(1 + al) - f.scale(al * (al + 1))).normalized()

    return op


def ball_geller(alpha) -> BallOp:
    """Delta_alpha = 4 (1 - |z|^2) Delta'_alpha; Delta_0 is the Laplace-Beltrami operator."""
    prime = ball_geller_prime(alpha)
    return lambda f: prime(f).times_w().scale(4).normalized()


# --- radial verifications ----------------------------------------------------


def verify_beta_identity(mutation: str | None = None) -> Residual:
    """rho^{beta+1} L_a rho^{-beta} = rho[rho(d^2 + Delta_Z) + L_0 - (2 beta - a) d] + beta(beta + 1 - a)."""
    F = ParamField()
    a, b = F.a, F.beta
    rho, d = DiffOperator.rho(F), DiffOperator.d(F)
    lhs = rho * conjugate(L_op(F, a), b)
    const = b * (b + 1 - a) + (1 if mutation == "constant" else 0)
    rhs = rho * (rho * (d**2 + F.delta_z) + F.lap0 - d * (2 * b - a)) + const
    return _residual("beta identity", lhs, rhs)


def verify_lemma_3_1(mutation: str | None = None) -> Residual:
    """rho^{(1+Q+a)/2} L_a rho^{(1-Q-a)/2} = B + Q^2/4 - (a-1)^2/4, B the bracket operator.

    Checked twice: as an operator normal form and by application to rho^sigma
    with sigma symbolic (a complete test for operators of this shape).
    ``mutation="q2_shift"`` replaces Q^2/4 by Q^2/4 + 1.
    """
    F = ParamField()
    a, Q = F.a, F.Q
    s = (Q + a - 1) / 2
    lhs = DiffOperator.rho(F) * conjugate(L_op(F, a), s)
    shift = 1 if mutation == "q2_shift" else 0
    rhs = ds_laplacian_bracket(F) + Q**2 / 4 + shift - (a - 1) ** 2 / 4
    res = _residual("conjugation", lhs, rhs)
    if not res.is_zero:
        return res
    f = FormalRadial(F, F.sigma, {0: F.ring(1)})
    diff = op_apply(lhs, f) - op_apply(rhs, f)
    return Residual("conjugation", diff.is_zero(), "0" if diff.is_zero() else str(diff.coeffs))


def verify_lemma_3_2(mutation: str | None = None) -> Residual:
    """L_{a+b}{L_{a-1}^2 + (b-1)^2 Delta_Z} = {L_a^2 + b^2 Delta_Z} L_{a+b-2}, b symbolic.

    ``mutation="flip_sign"`` uses -(b-1)^2 Delta_Z on the left.
    """
    F = ParamField()
    a, b, D = F.a, F.beta, F.delta_z
    sgn = -1 if mutation == "flip_sign" else 1
    lhs = L_op(F, a + b) * (L_op(F, a - 1) ** 2 + (b - 1) ** 2 * D * sgn)
    rhs = (L_op(F, a) ** 2 + b**2 * D) * L_op(F, a + b - 2)
    return _residual("square identity", lhs, rhs)


def verify_lemma_3_3(k: int, identity: int = 1, mutation: str | None = None) -> Residual:
    """The two product identities obtained by iterating the square identity.

    identity 1: L_{a+2k} prod_{j<=k}{L_{a-1}^2 + (2j-1)^2 D} = L_a prod_{j<=k}{L_a^2 + 4j^2 D}
    identity 2: L_{a+2k-1} L_{a-1} prod_{j<k}{L_{a-1}^2 + 4j^2 D} = prod_{j<=k}{L_a^2 + (2j-1)^2 D}
    ``mutation="flip_sign"`` flips the sign of the j = 1 odd-square term.
    """
    if k < 1:
        raise ValueError("k >= 1")
    F = ParamField()
    a, D = F.a, F.delta_z
    L = lambda c: L_op(F, c)  # noqa: E731

    def odd(j: int) -> int:
        return -1 if (mutation == "flip_sign" and j == 1) else 1

    if identity == 1:
        lhs = L(a + 2 * k) * _product((L(a - 1) ** 2 + odd(j) * (2 * j - 1) ** 2 * D for j in range(1, k + 1)), F)
        rhs = L(a) * _product((L(a) ** 2 + 4 * j * j * D for j in range(1, k + 1)), F)
    elif identity == 2:
        lhs = L(a + 2 * k - 1) * L(a - 1) * _product((L(a - 1) ** 2 + 4 * j * j * D for j in range(1, k)), F)
        rhs = _product((L(a) ** 2 + odd(j) * (2 * j - 1) ** 2 * D for j in range(1, k + 1)), F)
    else:
        raise ValueError("identity is 1 or 2")
    return _residual(f"product identity {identity}, k={k}", lhs, rhs)


def verify_damek_ricci_factorization(
    k: int, backend: str = "pairing", convention: str = "real", mutation: str | None = None
) -> Residual:
    """rho^{(k+Q+a)/2} prod_j [L_a - c_j T] rho^{(k-Q-a)/2} = prod_j {B + Q^2/4 - (a-k+2j-2)^2/4}.

    c_j = k + 1 - 2j.  With ``convention="real"`` T = sqrt(-Delta_Z) = xi, the
    form that holds; ``convention="imaginary"`` uses T = i xi (Gaussian backend
    only) and is kept as a documented failing variant.  The factors differ by
    scalars, so they commute and the product needs no ordering convention.
    ``mutation="shift"`` replaces (a-k+2j-2) by (a-k+2j-1).
    """
    if not 1 <= k:
        raise ValueError("k >= 1")
    F = ParamField(backend)
    a, Q = F.a, F.Q
    if convention == "real":
        T = F.xi
    elif convention == "imaginary":
        T = F.imag_unit() * F.xi
    else:
        raise ValueError(f"unknown convention {convention!r}")
    X = _product((L_op(F, a) - (k + 1 - 2 * j) * T for j in range(1, k + 1)), F)
    lhs = DiffOperator.rho(F, k) * conjugate(X, (Q + a - k) / 2)
    off = 1 if mutation == "shift" else 0
    B = ds_laplacian_bracket(F)
    rhs = _product((B + Q**2 / 4 - (a - k + 2 * j - 2 + off) ** 2 / 4 for j in range(1, k + 1)), F)
    return _residual(f"damek-ricci factorization k={k}", lhs, rhs)


# --- ball verifications --------------------------------------------------------


def _default_degree(m: int) -> int:
    return 4 if m == 1 else 3


def _ball_check(name: str, A: BallAlgebra, degree: int, both: Callable[[PolyElement], tuple[BallFunction, BallFunction]]) -> Residual:
    for u in A.monomials(degree):
        lhs, rhs = both(u)
        try:
            r = (lhs - rhs).normalized()
        except ValueError:
            return Residual(name, False, f"weights of the two sides differ on u = {u}")
        if not r.is_zero():
            return Residual(name, False, f"u = {u}: {r.to_text()}")
    return Residual(name, True, "0")


def _reweight(f: BallFunction, extra) -> BallFunction:
    return BallFunction(f.alg, f.exponent + f.alg.ring(extra), f.poly)


def verify_geller_intertwining(m: int, max_degree: int = 4, mutation: str | None = None) -> Residual:
    """Delta_{s-2m-1}[(1-|z|^2)^{s-2m-1} u] = (1-|z|^2)^{s-2m-1}[Delta_0 + 4s(2m+1-s)] u.

    ``mutation="constant"`` adds 1 to 4s(2m+1-s).
    """
    A = BallAlgebra(m)
    s = A.s
    al = s - 2 * m - 1
    c = 4 * s * (2 * m + 1 - s) + (1 if mutation == "constant" else 0)

    def both(u):
        lhs = ball_geller(al)(A.fn(u, al))
        rhs = _reweight(ball_geller(0)(A.fn(u)) + A.fn(u).scale(c), al)
        return lhs, rhs

    return _ball_check(f"geller intertwining m={m}", A, max_degree, both)


@dataclass(frozen=True)
class CommutatorReport:
    euler_commutator: Residual
    gamma_commutes: Residual
    weight_identity: Residual

    @property
    def all_zero(self) -> bool:
        return self.euler_commutator.is_zero and self.gamma_commutes.is_zero and self.weight_identity.is_zero


def verify_commutators(m: int, max_degree: int | None = None, mutation: str | None = None) -> CommutatorReport:
    """Three exact checks on the monomial basis.

    * [Delta'_0, R+Rbar] = 2 (Delta'_0 - (R+Rbar)/2 + (R+Rbar)^2/4 - Gamma/4)
    * [Gamma, Delta'_alpha] = 0 with alpha symbolic
    * [Delta - (4m+a+2)a][(1-|z|^2)^{-a/2} f] = 4 (1-|z|^2)^{1-a/2} Delta'_{a/2} f

    Mutations: ``"unit_factor"`` drops the factor 2 in the first identity,
    ``"weight_sign"`` uses the weight (1-|z|^2)^{a/2} in the third.
    """
    A = BallAlgebra(m)
    a = A.a
    deg = _default_degree(m) if max_degree is None else max_degree
    D0 = ball_geller_prime(0)
    factor = 1 if mutation == "unit_factor" else 2

    def euler(u):
        f = A.fn(u)
        lhs = D0(ball_euler(f)) - ball_euler(D0(f))
        q = A.ring(1) / 4
        rhs = D0(f) - ball_euler(f).scale(q * 2) + ball_euler(ball_euler(f)).scale(q) - ball_Gamma(f).scale(q)
        return lhs, rhs.scale(factor)

    P = ball_geller_prime(a)

    def gamma(u):
        f = A.fn(u)
        return ball_Gamma(P(f)), P(ball_Gamma(f))

    sign = 1 if mutation == "weight_sign" else -1

    def weight(u):
        e = sign * a / 2
        g = A.fn(u, e)
        lhs = ball_geller(0)(g) - g.scale((4 * m + a + 2) * a)
        rhs = _reweight(ball_geller_prime(a / 2)(A.fn(u)), 1 - a / 2).scale(4)
        return lhs, rhs

    return CommutatorReport(
        _ball_check(f"euler commutator m={m}", A, deg, euler),
        _ball_check(f"gamma commutes m={m}", A, deg, gamma),
        _ball_check(f"weight identity m={m}", A, deg, weight),
    )


def verify_lemma_6_1(m: int, max_degree: int | None = None, mutation: str | None = None) -> Residual:
    """D'_{(1-k-a)/2}{[D'_{(2-a)/2} + (k-1)^2/4]^2 - (k-1)^2/4 (Gamma+1)}
    = {[D'_{(1-a)/2} + k^2/4]^2 - k^2/4 (Gamma+1)} D'_{(3-k-a)/2}, with k and a symbolic.

    ``mutation="gamma_shift"`` replaces Gamma + 1 by Gamma.
    """
    A = BallAlgebra(m)
    a, k = A.a, A.k
    deg = _default_degree(m) if max_degree is None else max_degree
    one = 0 if mutation == "gamma_shift" else 1

    def g1(f):
        return ball_Gamma(f) + f.scale(one)

    def shifted(al, c):
        P = ball_geller_prime(al)
        return lambda f: P(f) + f.scale(c)

    def both(u):
        f = A.fn(u)
        X = shifted((2 - a) / 2, (k - 1) ** 2 / 4)
        lhs = ball_geller_prime((1 - k - a) / 2)(X(X(f)) - g1(f).scale((k - 1) ** 2 / 4))
        g = ball_geller_prime((3 - k - a) / 2)(f)
        Y = shifted((1 - a) / 2, k**2 / 4)
        rhs = Y(Y(g)) - g1(g).scale(k**2 / 4)
        return lhs, rhs

    return _ball_check(f"weighted laplacian m={m}", A, deg, both)


def verify_ball_factorization(m: int, k: int, max_degree: int | None = None, mutation: str | None = None) -> Residual:
    """4^k (1-|z|^2)^{(k+a+2m+1)/2} prod_j [...] f = prod_j [Delta + (2m+1)^2 - (a-k+2j-2)^2][(1-|z|^2)^{(a+2m+1-k)/2} f].

    Factors with c = +-(k+1-2j) are combined into
    (D' + c^2/4)^2 - (c^2/4)(Gamma + 1), D' = Delta'_{(1-a-2m-1)/2}, with a
    bare D' in the middle when k is odd.  This uses [Gamma, D'] = 0.
    ``mutation="imaginary_pairing"`` uses + (c^2/4)(Gamma + 1), the pairing
    of imaginary coefficients; it is vacuous for k = 1, where
    ``mutation="constant"`` (one extra unit in a scalar shift) applies.
    """
    if not 1 <= k:
        raise ValueError("k >= 1")
    A = BallAlgebra(m)
    a = A.a
    deg = _default_degree(m) if max_degree is None else max_degree
    al = (1 - a - (2 * m + 1)) / 2
    P = ball_geller_prime(al)
    sgn = 1 if mutation == "imaginary_pairing" else -1
    cs = [k + 1 - 2 * j for j in range(1, k + 1) if k + 1 - 2 * j > 0]

    def lhs_poly(f: BallFunction) -> BallFunction:
        g = f
        for c in cs:
            q = A.ring(c * c) / 4
            X = lambda h, q=q: P(h) + h.scale(q)  # noqa: E731
            g = X(X(g)) + (ball_Gamma(g) + g).scale(sgn * q)
        if k % 2:
            g = P(g)
        return g

    def both(u):
        lhs = _reweight(lhs_poly(A.fn(u)).scale(4**k), (k + a + 2 * m + 1) / 2)
        g = A.fn(u, (a + 2 * m + 1 - k) / 2)
        lap = ball_geller(0)
        for j in range(k, 0, -1):
            shift = (2 * m + 1) ** 2 - (a - k + 2 * j - 2) ** 2 + (1 if mutation == "constant" and j == k else 0)
            g = (lap(g) + g.scale(shift)).normalized()
        return lhs, g

    return _ball_check(f"ball factorization m={m}, k={k}", A, deg, both)


__all__ = [
    "ParamField",
    "DiffOperator",
    "FormalRadial",
    "BallAlgebra",
    "BallFunction",
    "Residual",
    "CommutatorReport",
    "op_compose",
    "op_apply",
    "conjugate",
    "L_op",
    "ds_laplacian_bracket",
    "ball_R",
    "ball_Rbar",
    "ball_D1",
    "ball_D1bar",
    "ball_Gamma",
    "ball_euler",
    "ball_geller",
    "ball_geller_prime",
    "verify_beta_identity",
    "verify_lemma_3_1",
    "verify_lemma_3_2",
    "verify_lemma_3_3",
    "verify_damek_ricci_factorization",
    "verify_geller_intertwining",
    "verify_commutators",
    "verify_lemma_6_1",
    "verify_ball_factorization",
]
