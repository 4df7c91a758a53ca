import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from rank1.division_algebras import (
    Octonion,
    Quaternion,
    complex_to_q,
    herm_q,
    norm,
    oct_conj,
    oct_inv,
    oct_mul,
    octonion_table,
    phi_ca,
    psi_ca,
    psi_ca_branch,
    q_to_complex,
    quat_conj,
    quat_inv,
    quat_mul,
)

finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)
quat = arrays(np.float64, 4, elements=finite)
octo = arrays(np.float64, 8, elements=finite)


def test_hamilton_table():
    e = np.eye(4)
    i, j, k = e[1], e[2], e[3]
    assert np.array_equal(quat_mul(i, j), k)
    assert np.array_equal(quat_mul(j, i), -k)
    assert np.array_equal(quat_mul(quat_mul(i, j), k), -e[0])


@given(quat, quat, quat)
def test_quaternions_associative(p, q, r):
    lhs = quat_mul(quat_mul(p, q), r)
    rhs = quat_mul(p, quat_mul(q, r))
    assert np.allclose(lhs, rhs, atol=1e-12)


@given(quat, quat)
def test_quaternion_norm_multiplicative(p, q):
    assert norm(quat_mul(p, q)) == pytest.approx(norm(p) * norm(q), rel=1e-12, abs=1e-12)
    assert np.allclose(quat_conj(quat_mul(p, q)), quat_mul(quat_conj(q), quat_conj(p)))


@given(quat.filter(lambda q: np.sum(q * q) > 1e-3))
def test_quaternion_inverse(q):
    assert np.allclose(quat_mul(q, quat_inv(q)), [1, 0, 0, 0], atol=1e-10)


def test_quaternion_class_wraps_arrays():
    p, q = Quaternion(1, 2, 3, 4), Quaternion(0.5, -1, 0, 2)
    assert np.allclose((p * q).array, quat_mul(p.array, q.array))
    assert abs(p) == pytest.approx(np.sqrt(30))
    assert (p + q - q).array.tolist() == p.array.tolist()
    assert np.allclose((p * p.conj()).array, [30, 0, 0, 0])


def test_octonion_table_is_a_signed_permutation():
    table = octonion_table()
    for row in table:
        assert sorted(idx for _, idx in row) == list(range(8))
        assert all(s in (1, -1) for s, _ in row)
    # imaginary units square to -1 and anticommute
    for i in range(1, 8):
        assert table[i][i] == (-1, 0)
        for j in range(1, 8):
            if i != j:
                assert table[i][j][1] == table[j][i][1]
                assert table[i][j][0] == -table[j][i][0]


def test_octonions_not_associative():
    e = np.eye(8)
    a = oct_mul(oct_mul(e[1], e[2]), e[4])
    b = oct_mul(e[1], oct_mul(e[2], e[4]))
    assert np.allclose(a, -b)


@given(octo, octo)
@settings(max_examples=60)
def test_octonions_alternative_and_moufang(x, y):
    assert np.allclose(oct_mul(oct_mul(x, x), y), oct_mul(x, oct_mul(x, y)), atol=1e-10)
    assert np.allclose(oct_mul(oct_mul(y, x), x), oct_mul(y, oct_mul(x, x)), atol=1e-10)
    # Moufang: (x y x) z form checked as x(y(xz)) = ((xy)x)z
    z = oct_conj(x) + y
    lhs = oct_mul(x, oct_mul(y, oct_mul(x, z)))
    rhs = oct_mul(oct_mul(oct_mul(x, y), x), z)
    assert np.allclose(lhs, rhs, atol=1e-9)


@given(octo, octo)
def test_octonion_composition(x, y):
    assert norm(oct_mul(x, y)) == pytest.approx(norm(x) * norm(y), rel=1e-12, abs=1e-12)


@given(octo.filter(lambda o: np.sum(o * o) > 1e-3))
def test_octonion_inverse(o):
    one = np.eye(8)[0]
    assert np.allclose(oct_mul(o, oct_inv(o)), one, atol=1e-10)
    assert np.allclose(oct_mul(oct_inv(o), o), one, atol=1e-10)


def test_octonion_class():
    a = Octonion.from_array(np.arange(8.0))
    b = Octonion.from_array(np.ones(8))
    assert np.allclose((a * b).array, oct_mul(a.array, b.array))
    assert np.allclose(a.conj().array, oct_conj(a.array))


@given(arrays(np.float64, (2, 4), elements=finite), arrays(np.float64, (2, 4), elements=finite), quat)
def test_herm_q_left_linear(z, w, lam):
    lz = quat_mul(lam, z)
    assert np.allclose(herm_q(lz, w), quat_mul(lam, herm_q(z, w)), atol=1e-10)
    assert np.allclose(herm_q(w, z), quat_conj(herm_q(z, w)), atol=1e-12)
    assert herm_q(z, z)[0] == pytest.approx(np.sum(z * z))


def test_herm_q_shape_mismatch():
    with pytest.raises(ValueError):
        herm_q(np.zeros((2, 4)), np.zeros((3, 4)))


@given(arrays(np.float64, (3, 4), elements=finite))
def test_complex_coordinates_round_trip(q):
    zc = q_to_complex(q)
    assert zc.shape == (6,)
    assert np.allclose(complex_to_q(zc), q)
    assert np.sum(np.abs(zc) ** 2) == pytest.approx(np.sum(q * q))


def _ball_points(seed, n=1):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        p = rng.standard_normal(16)
        out.append(p / np.linalg.norm(p) * rng.uniform(0.0, 0.95))
    return out


@given(st.integers(0, 2**32 - 1))
def test_psi_branches_agree(seed):
    z, w = _ball_points(seed, 2)
    assert psi_ca(z, w) == pytest.approx(psi_ca_branch(z, w), rel=1e-10)
    w[8:] = 0
    assert psi_ca(z, w) == pytest.approx(psi_ca_branch(z, w), rel=1e-10)


@given(st.integers(0, 2**32 - 1))
def test_phi_ca_symmetric_and_diagonal(seed):
    z, w = _ball_points(seed, 2)
    assert phi_ca(z, w) == pytest.approx(phi_ca(w, z), rel=1e-12)
    # on the diagonal Phi(z, z) = |z|^4, so Psi(z, z) = (1 - |z|^2)^2
    assert psi_ca(z, z) == pytest.approx((1 - np.sum(z * z)) ** 2, rel=1e-10)


def test_cayley_points_must_be_sixteen_dimensional():
    with pytest.raises(ValueError):
        phi_ca(np.zeros(8), np.zeros(8))
