import numpy as np
import pytest
import sympy as sp
from sympy.polys.domains import QQ
from hypothesis import given, settings, strategies as st

from rank1 import op_algebra as oa
from rank1.ball_geometry import laplace_beltrami_q
from rank1.op_algebra import (
    BallAlgebra,
    DiffOperator,
    FormalRadial,
    L_op,
    ParamField,
    ball_Gamma,
    ball_R,
    ball_Rbar,
    ball_euler,
    ball_geller,
    conjugate,
    op_apply,
    op_compose,
)

F = ParamField()

small = st.integers(-3, 3)
terms = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(-2, 3)), small.filter(bool), max_size=4)


def make_op(spec):
    return DiffOperator(F, {k: F.ring(v) for k, v in spec.items()})


def radial(coeffs):
    return FormalRadial(F, F.sigma, {p: F.ring(c) for p, c in coeffs.items() if c})


@given(terms, terms, st.dictionaries(st.integers(-2, 2), small, min_size=1, max_size=3))
@settings(max_examples=60, deadline=None)
def test_composition_agrees_with_application(a, b, f):
    A, B, u = make_op(a), make_op(b), radial(f)
    lhs = op_apply(op_compose(A, B), u)
    rhs = op_apply(A, op_apply(B, u))
    assert (lhs - rhs).is_zero()


@given(terms, st.dictionaries(st.integers(-2, 2), small, min_size=1, max_size=3))
@settings(max_examples=40, deadline=None)
def test_conjugation_by_symbolic_power(a, f):
    # (rho^s A rho^{-s}) u = rho^s A(rho^{-s} u); shift the exponent of u by -s by hand
    A, u = make_op(a), radial(f)
    s = F.s
    lhs = op_apply(conjugate(A, s), u)
    shifted = FormalRadial(F, F.sigma - s, u.coeffs)
    inner = op_apply(A, shifted)
    back = FormalRadial(F, F.sigma, inner.coeffs)
    assert (lhs - back).is_zero()


def test_operator_arithmetic():
    rho, d = DiffOperator.rho(F), DiffOperator.d(F)
    # [d, rho] = 1
    assert (d * rho - rho * d - 1).is_zero()
    assert (d**3).order() == 3
    assert DiffOperator.zero(F).to_text() == "0"
    assert (2 - d + d).terms == {(0, 0): F.ring(2)}


def test_L_op_against_sympy():
    # L_c applied to rho^sigma with numeric symbols, compared with direct differentiation
    r, sig = sp.symbols("r sigma")
    vals = {"a": 0, "Q": 0, "xi": sp.Rational(3, 2), "ell": sp.Rational(-2, 7), "c": sp.Rational(5, 3)}
    f = r**sig
    direct = r * sp.diff(f, r, 2) + vals["c"] * sp.diff(f, r) - r * vals["xi"] ** 2 * f + vals["ell"] * f
    out = op_apply(L_op(F, F.a), radial({0: 1}))
    engine = 0
    for p, c in out.coeffs.items():
        ce = sp.sympify(str(c.as_expr())).subs({sp.Symbol("a"): vals["c"], sp.Symbol("xi"): vals["xi"], sp.Symbol("ell"): vals["ell"]})
        engine += ce.subs(sp.Symbol("sigma"), sig) * r ** (sig + p)
    assert sp.simplify(sp.expand(direct - engine)) == 0


def test_param_field_backends():
    G = ParamField("gaussian")
    i = G.imag_unit()
    assert i * i == G.ring(-1)
    with pytest.raises(ValueError):
        F.imag_unit()
    with pytest.raises(ValueError):
        ParamField("complex")
    with pytest.raises(AttributeError):
        F.nonexistent


def _numeric(alg, fun, z):
    """Evaluate (1 - |z|^2)^e P(z, zbar) at complex z, exponent and poly free of a, k, s."""
    zb = np.conj(z)
    vals = list(z) + list(zb) + [0, 0, 0]
    p = sum(complex(float(c)) * np.prod([v**e for v, e in zip(vals, mon)]) for mon, c in fun.poly.terms())
    e = float(fun.exponent.LC) if fun.exponent else 0.0
    return (1 - np.sum(np.abs(z) ** 2)) ** e * p


def test_ball_laplacian_against_finite_differences():
    A = BallAlgebra(2)
    z1, z2, z3, z4 = A.z
    zb1, zb2, zb3, zb4 = A.zb
    u = A.fn(z1 * zb2 + 3 * z3 * z3 - zb4 * z1 * z2, exponent=QQ(3, 2))
    lap = ball_geller(0)(u)
    rng = np.random.default_rng(4)
    for _ in range(3):
        z = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) * 0.2

        def re_u(w):
            w = np.atleast_2d(w)
            return np.array([_numeric(A, u, x).real for x in w])

        fd = laplace_beltrami_q(lambda w: re_u(w), z)
        assert fd == pytest.approx(_numeric(A, lap, z).real, rel=1e-5, abs=1e-7)


def test_ball_vector_fields_on_monomials():
    A = BallAlgebra(1)
    z1, z2 = A.z
    zb1, _ = A.zb
    f = A.fn(z1 * z1 * zb1)
    assert ball_R(f).poly == 2 * z1 * z1 * zb1
    assert ball_Rbar(f).poly == z1 * z1 * zb1
    assert ball_euler(f).poly == 3 * z1 * z1 * zb1
    # Gamma annihilates constants
    assert ball_Gamma(A.fn(1)).is_zero()
    with pytest.raises(ValueError):
        BallAlgebra(3)


def test_normalization_absorbs_weight():
    A = BallAlgebra(1)
    f = A.fn(A.w**2 * A.z[0], exponent=A.s)
    g = f.normalized()
    assert g.poly == A.z[0]
    assert g.exponent == A.s + 2


@pytest.mark.parametrize(
    "check",
    [
        lambda: oa.verify_beta_identity(),
        lambda: oa.verify_lemma_3_1(),
        lambda: oa.verify_lemma_3_2(),
        lambda: oa.verify_lemma_3_3(2, identity=1),
        lambda: oa.verify_lemma_3_3(2, identity=2),
        lambda: oa.verify_damek_ricci_factorization(2),
        lambda: oa.verify_geller_intertwining(1, max_degree=2),
        lambda: oa.verify_lemma_6_1(1, max_degree=2),
        lambda: oa.verify_ball_factorization(1, 2, max_degree=2),
    ],
)
def test_identities_hold(check):
    res = check()
    assert res.is_zero and bool(res)
    assert res.text == "0"


@pytest.mark.parametrize(
    "check",
    [
        lambda: oa.verify_beta_identity(mutation="constant"),
        lambda: oa.verify_lemma_3_1(mutation="q2_shift"),
        lambda: oa.verify_lemma_3_2(mutation="flip_sign"),
        lambda: oa.verify_lemma_3_3(2, mutation="flip_sign"),
        lambda: oa.verify_damek_ricci_factorization(2, mutation="shift"),
        lambda: oa.verify_geller_intertwining(1, max_degree=2, mutation="constant"),
        lambda: oa.verify_lemma_6_1(1, max_degree=2, mutation="gamma_shift"),
        lambda: oa.verify_ball_factorization(1, 2, max_degree=2, mutation="imaginary_pairing"),
        lambda: oa.verify_ball_factorization(1, 1, max_degree=2, mutation="constant"),
    ],
)
def test_mutations_are_detected(check):
    res = check()
    assert not res.is_zero
    assert res.text != "0"


def test_imaginary_pairing_breaks_beyond_first_order():
    assert oa.verify_damek_ricci_factorization(1, backend="gaussian", convention="imaginary").is_zero
    assert not oa.verify_damek_ricci_factorization(2, backend="gaussian", convention="imaginary").is_zero


def test_commutator_report():
    rep = oa.verify_commutators(1, max_degree=2)
    assert rep.all_zero
    bad = oa.verify_commutators(1, max_degree=2, mutation="weight_sign")
    assert not bad.all_zero
