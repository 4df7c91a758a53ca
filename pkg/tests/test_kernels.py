import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rank1.ball_geometry import RadialProfile, space_descriptor
from rank1.kernels import (
    BGRParams,
    HeatKernelClosedForm,
    b_const,
    bgr_kernel,
    bgr_profile,
    convolution_hypothesis,
    derivative_bound_check,
    euclidean_riesz_convolution_mc,
    heat_kernel,
    heat_kernel_mass,
    heat_kernel_real_odd,
    hypertrig_integral,
    radial_convolve,
    rank_one_form,
    real_odd_form,
    small_distance_constant,
)
from rank1.specfun import riesz_constant

H1 = space_descriptor("q", 1)
H2 = space_descriptor("q", 2)
CA = space_descriptor("ca", 2)


def test_three_dimensional_form_is_one_monomial():
    form = real_odd_form(1)
    # -(1/sinh r) d/dr e^{-r^2/4t} = r / (2 t sinh r) e^{-r^2/4t}
    assert form.terms == {(1, -1, 0, 1): Fraction(1, 2)}
    assert b_const(1) / 2 == pytest.approx((4 * math.pi) ** -1.5, rel=1e-15)


@given(st.floats(0.05, 3.0), st.floats(0.01, 6.0))
def test_three_dimensional_heat_kernel(t, rho):
    ref = (4 * math.pi * t) ** -1.5 * rho / math.sinh(rho) * math.exp(-t - rho * rho / (4 * t))
    assert heat_kernel_real_odd(1, t, rho) == pytest.approx(ref, rel=1e-12)


def test_derivative_is_leibniz():
    g = HeatKernelClosedForm.gaussian()
    d2 = g.derivative().derivative()
    # (e^{-r^2/4t})'' = (r^2/4t^2 - 1/2t) e^{-r^2/4t}
    assert d2.terms == {(2, 0, 0, 2): Fraction(1, 4), (0, 0, 0, 1): Fraction(-1, 2)}


@pytest.mark.parametrize("mt,mu", [(0, 2), (2, 2), (4, 2), (4, 4)])
def test_grouped_taylor_series_are_analytic(mt, mu):
    tay = rank_one_form(mt, mu).taylor()
    assert all(len(c) > 0 for c in tay.values())


@given(st.floats(0.3, 0.49))
@settings(max_examples=30)
def test_series_and_monomials_agree_below_switch(r):
    # the monomial sum cancels badly near 0, so compare only where it is still accurate
    form = rank_one_form(2, 2)
    c = form.compile()
    c_far = type(c)(form, radius=0.0)
    a, b = c(np.array([r]), 0.7), c_far(np.array([r]), 0.7)
    assert a[0] == pytest.approx(b[0], rel=1e-8)


@pytest.mark.parametrize("space", [H1, H2, CA])
def test_heat_kernel_mass_is_one(space):
    assert heat_kernel_mass(space, 0.3) == pytest.approx(1.0, abs=1e-3)


def test_heat_kernel_decreases_and_validates():
    vals = heat_kernel(H2, 0.5, np.array([0.0, 0.5, 1.0, 2.0, 4.0]))
    assert np.all(np.diff(vals) < 0)
    with pytest.raises(ValueError):
        heat_kernel(H2, 0.0, 1.0)
    with pytest.raises(ValueError):
        heat_kernel(H2, 1.0, -1.0)


def test_heat_kernel_small_time_is_euclidean_at_origin():
    t = 1e-3
    assert heat_kernel(H2, t, 0.0) == pytest.approx((4 * math.pi * t) ** -4, rel=0.05)


def test_bgr_params_validation():
    with pytest.raises(ValueError):
        BGRParams(H2, 0.0, 3.5)
    with pytest.raises(ValueError):
        BGRParams(H2, -1.0, 1.0)
    with pytest.raises(ValueError):
        BGRParams(H2, 1.0, 9.0)
    BGRParams(H2, 1.0, 5.0)


def test_bgr_kernel_decreasing_and_dominated():
    rho = np.array([0.05, 0.2, 0.8, 2.0, 5.0])
    k0 = bgr_kernel(BGRParams(H2, 0.0, 1.5), rho)
    k1 = bgr_kernel(BGRParams(H2, 1.0, 1.5), rho)
    assert np.all(np.diff(k0) < 0)
    assert np.all(k1 < k0)


def test_bgr_kernel_small_distance_constant():
    p = BGRParams(H1, 0.0, 1.0)
    rho = 1e-3
    assert bgr_kernel(p, rho) * rho ** (H1.N - 1.0) * riesz_constant(4, 1.0).value == pytest.approx(1.0, rel=0.01)


def test_bgr_profile_interpolates():
    p = BGRParams(H1, 0.5, 1.5)
    prof = bgr_profile(p, n=60)
    for r in (0.01, 0.7, 3.3):
        assert float(prof(r)) == pytest.approx(bgr_kernel(p, r), rel=1e-4)


def test_hypertrig_beta_two():
    rho = 0.8
    closed, quad = hypertrig_integral(2.0, rho)
    assert closed == pytest.approx(math.sinh(rho) ** -2 / math.sqrt(2), rel=1e-14)
    assert quad == pytest.approx(closed, rel=1e-10)
    with pytest.raises(ValueError):
        hypertrig_integral(0.0, 1.0)


@given(st.floats(0.2, 8.0), st.floats(0.05, 3.0), st.floats(0.05, 3.0))
@settings(max_examples=30)
def test_hypertrig_scaling(beta, r1, r2):
    c1, _ = hypertrig_integral(beta, r1)
    c2, _ = hypertrig_integral(beta, r2)
    assert c1 * math.sinh(r1) ** beta == pytest.approx(c2 * math.sinh(r2) ** beta, rel=1e-12)


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("gamma", [0.5, 1.5, 2.5])
def test_small_distance_constant(m, gamma):
    assembled, expected = small_distance_constant(m, gamma)
    assert assembled == pytest.approx(expected, rel=1e-12)


def test_euclidean_riesz_convolution():
    est, err, closed = euclidean_riesz_convolution_mc(1.0, 1.5, samples=200_000, seed=7)
    assert abs(est - closed) < 3 * err
    with pytest.raises(ValueError):
        euclidean_riesz_convolution_mc(2.0, 2.5)


def _gauss(a, w):
    return RadialProfile(lambda r: a * np.exp(-r * r / w), decay_rate=math.inf)


def test_convolution_at_origin_is_an_inner_product():
    from scipy import integrate

    f, g = _gauss(1.0, 0.5), _gauss(2.0, 0.3)
    direct, _ = integrate.quad(lambda r: float(f(r) * g(r) * H2.density(r)), 0, 10)
    mc = radial_convolve(H2, f, g, 0.0, samples=200_000, seed=3)
    assert abs(mc.value - direct) < 4 * mc.std_error
    q = radial_convolve(H2, f, g, 0.0, method="quad")
    assert q.value == pytest.approx(direct, rel=1e-6)


def test_convolution_backends_agree_off_origin():
    f, g = _gauss(1.0, 0.5), _gauss(1.0, 0.4)
    mc = radial_convolve(H1, f, g, 0.6, samples=200_000, seed=11)
    q = radial_convolve(H1, f, g, 0.6, method="quad")
    assert abs(mc.value - q.value) < 4 * mc.std_error
    # convolution of radial functions commutes
    q2 = radial_convolve(H1, g, f, 0.6, method="quad")
    assert q2.value == pytest.approx(q.value, rel=1e-6)


def test_convolution_is_seed_deterministic():
    f = _gauss(1.0, 0.5)
    a = radial_convolve(H2, f, f, 0.3, samples=20_000, seed=5)
    b = radial_convolve(H2, f, f, 0.3, samples=20_000, seed=5)
    assert a == b
    with pytest.raises(ValueError):
        radial_convolve(H2, f, f, 0.3, method="simpson")


def test_derivative_bound_ratio_bounded():
    rep = derivative_bound_check(2, 2, 1.5, np.linspace(0.5, 20, 40))
    assert np.isfinite(rep.max_ratio)
    assert rep.tail_monotone
    with pytest.raises(ValueError):
        derivative_bound_check(1, 1, 1.5, [0.0, 1.0])


def test_convolution_hypothesis():
    assert convolution_hypothesis(H2, 0.0, 0.0, 1.0, 1.0)
    assert not convolution_hypothesis(H2, 0.0, 0.0, 4.0, 4.0)
    assert convolution_hypothesis(CA, 0.0, 0.0, 4.0, 4.0)
    assert not convolution_hypothesis(CA, 0.0, 0.0, 6.0, 6.0)
