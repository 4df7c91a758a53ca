import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rank1.division_algebras import psi_ca
from rank1.funk_hecke import (
    BisphericalIndex,
    ZonalKernel,
    ajk_coefficients,
    eigenvalue_octonionic,
    eigenvalue_quaternionic,
    mc_zonal_integral,
    poisson_eigen_ca,
    poisson_eigen_q,
)
from rank1.specfun import DomainError, sphere_area

INDICES = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (3, 2)]


def test_index_validation():
    assert BisphericalIndex(3, 1).ell == 2
    with pytest.raises(ValueError):
        BisphericalIndex(1, 2)
    with pytest.raises(TypeError):
        BisphericalIndex(1.0, 0)


@pytest.mark.parametrize("n", [1, 2])
def test_constant_kernel_only_sees_constants(n):
    area = sphere_area(4 * n + 3)
    K = ZonalKernel.constant()
    for j, k in INDICES:
        lam = eigenvalue_quaternionic(BisphericalIndex(j, k), n, K)
        assert lam == pytest.approx(area if (j, k) == (0, 0) else 0.0, abs=1e-10 * area)


@pytest.mark.parametrize("n", [1, 2])
def test_real_part_kernel_acts_on_linear_functions(n):
    # (zeta . eta) reproduces linear functions with factor |S|/dim
    area = sphere_area(4 * n + 3)
    K = ZonalKernel(lambda s, x: x)
    for j, k in INDICES:
        lam = eigenvalue_quaternionic(BisphericalIndex(j, k), n, K)
        assert lam == pytest.approx(area / (4 * n + 4) if (j, k) == (1, 0) else 0.0, abs=1e-9 * area)


def test_octonionic_constant_and_linear_kernels():
    area = sphere_area(15)
    for j, k in INDICES:
        idx = BisphericalIndex(j, k)
        assert eigenvalue_octonionic(idx, ZonalKernel.constant()) == pytest.approx(area if (j, k) == (0, 0) else 0.0, abs=1e-10 * area)
        lin = eigenvalue_octonionic(idx, ZonalKernel(lambda s, x: x))
        assert lin == pytest.approx(area / 16 if (j, k) == (1, 0) else 0.0, abs=1e-9 * area)


def test_ajk_coefficients_exact():
    a = ajk_coefficients(BisphericalIndex(0, 0))
    assert all(isinstance(c, Fraction) for c in a)
    # at l = 0 the cosine combination is (2/15) sin^6, sin^6 = (10 - 15 c2 + 6 c4 - c6) / 32
    assert list(a) == [Fraction(2, 15) * Fraction(c, 32) for c in (10, -15, 6, -1)]


@given(st.floats(0.0, 0.9), st.floats(0.25, 3.0), st.integers(1, 3))
@settings(max_examples=25, deadline=None)
def test_poisson_closed_form_vs_quadrature(r, alpha, n):
    lam = eigenvalue_quaternionic(BisphericalIndex(0, 0), n, ZonalKernel.poisson(alpha, r))
    assert lam == pytest.approx(poisson_eigen_q(alpha, r, n), rel=1e-7)


@given(st.floats(0.0, 0.6), st.floats(0.25, 3.5))
@settings(max_examples=20, deadline=None)
def test_octonionic_poisson_closed_form(r, alpha):
    lam = eigenvalue_octonionic(BisphericalIndex(0, 0), ZonalKernel.poisson(alpha, r))
    assert lam == pytest.approx(poisson_eigen_ca(alpha, r), rel=1e-6)


def test_poisson_at_zero_radius_is_area():
    assert poisson_eigen_q(1.5, 0.0, 1) == pytest.approx(sphere_area(7))
    assert poisson_eigen_ca(2.0, 0.0) == pytest.approx(sphere_area(15))
    with pytest.raises(DomainError):
        poisson_eigen_q(1.0, 1.0, 1)
    with pytest.raises(DomainError):
        poisson_eigen_ca(-1.0, 0.5)


def test_kernels_are_linear():
    K1, K2 = ZonalKernel.poisson(1.5, 0.4), ZonalKernel(lambda s, x: x * x)
    idx = BisphericalIndex(2, 0)
    both = eigenvalue_quaternionic(idx, 1, K1 + K2.scale(3.0))
    sep = eigenvalue_quaternionic(idx, 1, K1) + 3 * eigenvalue_quaternionic(idx, 1, K2)
    assert both == pytest.approx(sep, rel=1e-12)


def test_non_integrable_kernel_raises():
    K = ZonalKernel(lambda s, x: np.full(np.broadcast(s, x).shape, np.inf))
    with pytest.raises(ValueError):
        eigenvalue_quaternionic(BisphericalIndex(0, 0), 1, K)


def test_mc_octonionic_poisson_within_three_sigma():
    alpha, r = 1.5, 0.5
    z = np.zeros(16)
    z[0] = r
    val, se = mc_zonal_integral(15, lambda x: psi_ca(z, x) ** (-alpha), samples=200_000, seed=1)
    assert abs(val - poisson_eigen_ca(alpha, r)) < 3 * se


def test_mc_is_deterministic_and_checks_samples():
    f = lambda x: x[:, 0] ** 2  # noqa: E731
    assert mc_zonal_integral(3, f, samples=10_000, seed=9) == mc_zonal_integral(3, f, samples=10_000, seed=9)
    val, se = mc_zonal_integral(3, f, samples=100_000, seed=9)
    assert abs(val - sphere_area(3) / 4) < 4 * se
    with pytest.raises(ValueError):
        mc_zonal_integral(3, f, samples=10)
