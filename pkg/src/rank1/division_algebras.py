"""Quaternion and octonion arithmetic on numpy arrays.

Elements are arrays whose last axis holds the real components, so every
routine broadcasts over leading axes (Monte Carlo batches, grids).

Quaternion basis (1, i1, i2, i3) with the Hamilton table i1 i2 = i3.
A point of Q^m is an array of shape (..., m, 4); under the identification
q_j = z_j + z_{m+j} i2 with z_j = x + y i1 it corresponds to the complex
vector (z_1..z_m, z_{m+1}..z_{2m}) in C^{2m}.

Octonions come from one Cayley-Dickson doubling of the quaternions,
o = (a, b) with (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)).  Basis
e0..e3 is (quaternion basis, 0) and e4..e7 is (0, quaternion basis).  The
resulting table (row times column, signs shown) is

        e1   e2   e3   e4   e5   e6   e7
   e1  -1   e3  -e2   e5  -e4  -e7   e6
   e2  -e3  -1   e1   e6   e7  -e4  -e5
   e3   e2  -e1  -1   e7  -e6   e5  -e4
   e4  -e5  -e6  -e7  -1   e1   e2   e3
   e5   e4  -e7   e6  -e1  -1  -e3   e2
   e6   e7   e4  -e5  -e2   e3  -1  -e1
   e7  -e6   e5   e4  -e3  -e2   e1  -1

(``octonion_table`` regenerates it; the tests compare against this copy.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

Array = NDArray[np.float64]


def _arr(x: ArrayLike) -> Array:
    return np.asarray(x, dtype=float)


# --- quaternions -----------------------------------------------------------

def quat_mul(p: ArrayLike, q: ArrayLike) -> Array:
    """Hamilton product, broadcasting over leading axes."""
    p, q = _arr(p), _arr(q)
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


def quat_conj(q: ArrayLike) -> Array:
    q = _arr(q)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def norm(x: ArrayLike) -> Array:
    """Euclidean norm over the component axis (works for both algebras)."""
    return np.sqrt(np.sum(_arr(x) ** 2, axis=-1))


def quat_inv(q: ArrayLike) -> Array:
    q = _arr(q)
    return quat_conj(q) / np.sum(q**2, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Quaternion:
    """Small value wrapper; the array functions above do the real work."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @property
    def array(self) -> Array:
        return np.array([self.w, self.x, self.y, self.z])

    @classmethod
    def from_array(cls, a: ArrayLike) -> "Quaternion":
        return cls(*map(float, _arr(a)))

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(quat_mul(self.array, other.array))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.array + other.array)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.array - other.array)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def __abs__(self) -> float:
        return float(norm(self.array))


# --- octonions -------------------------------------------------------------

def oct_mul(o1: ArrayLike, o2: ArrayLike) -> Array:
    """Cayley-Dickson product of octonions stored as (..., 8) arrays."""
    o1, o2 = _arr(o1), _arr(o2)
    a, b = o1[..., :4], o1[..., 4:]
    c, d = o2[..., :4], o2[..., 4:]
    first = quat_mul(a, c) - quat_mul(quat_conj(d), b)
    second = quat_mul(d, a) + quat_mul(b, quat_conj(c))
    return np.concatenate([first, second], axis=-1)


def oct_conj(o: ArrayLike) -> Array:
    o = _arr(o)
    sign = -np.ones(8)
    sign[0] = 1.0
    return o * sign


def oct_inv(o: ArrayLike) -> Array:
    o = _arr(o)
    return oct_conj(o) / np.sum(o**2, axis=-1, keepdims=True)


def octonion_table() -> list[list[tuple[int, int]]]:
    """Multiplication table as (sign, index) pairs: e_i e_j = sign * e_index."""
    eye = np.eye(8)
    table = []
    for i in range(8):
        row = []
        for j in range(8):
            prod = oct_mul(eye[i], eye[j])
            k = int(np.argmax(np.abs(prod)))
            row.append((int(np.sign(prod[k])), k))
        table.append(row)
    return table


@dataclass(frozen=True)
class Octonion:
    components: tuple[float, ...] = (0.0,) * 8

    @property
    def array(self) -> Array:
        return np.array(self.components, dtype=float)

    @classmethod
    def from_array(cls, a: ArrayLike) -> "Octonion":
        return cls(tuple(map(float, _arr(a))))

    def __mul__(self, other: "Octonion") -> "Octonion":
        return Octonion.from_array(oct_mul(self.array, other.array))

    def __add__(self, other: "Octonion") -> "Octonion":
        return Octonion.from_array(self.array + other.array)

    def __sub__(self, other: "Octonion") -> "Octonion":
        return Octonion.from_array(self.array - other.array)

    def conj(self) -> "Octonion":
        return Octonion.from_array(oct_conj(self.array))

    def __abs__(self) -> float:
        return float(norm(self.array))


# --- quaternionic Hermitian form -------------------------------------------

def herm_q(z: ArrayLike, w: ArrayLike) -> Array:
    """<z, w>_Q = sum_j z_j conj(w_j) for points of shape (..., m, 4).

    Left-linear in z, so <lam z, w> = lam <z, w> and P_w z = <z,w>|w|^{-2} w is
    the orthogonal projection onto the left line through w.
    """
    z, w = _arr(z), _arr(w)
    if z.shape[-2:] != w.shape[-2:]:
        raise ValueError(f"dimension mismatch {z.shape} vs {w.shape}")
    return np.sum(quat_mul(z, quat_conj(w)), axis=-2)


def q_to_complex(q: ArrayLike) -> NDArray[np.complex128]:
    """Map Q^m (..., m, 4) to C^{2m} via q_j = z_j + z_{m+j} i2."""
    q = _arr(q)
    first = q[..., 0] + 1j * q[..., 1]
    second = q[..., 2] + 1j * q[..., 3]
    return np.concatenate([first, second], axis=-1)


def complex_to_q(z: ArrayLike) -> Array:
    """Inverse of :func:`q_to_complex`."""
    z = np.asarray(z, dtype=complex)
    m = z.shape[-1] // 2
    a, b = z[..., :m], z[..., m:]
    return np.stack([a.real, a.imag, b.real, b.imag], axis=-1)


# --- Cayley plane forms ----------------------------------------------------

def _split(p: ArrayLike) -> tuple[Array, Array]:
    p = _arr(p)
    if p.shape[-1] != 16:
        raise ValueError("Cayley points live in Ca^2 = R^16")
    return p[..., :8], p[..., 8:]


def phi_ca(z: ArrayLike, w: ArrayLike) -> Array:
    """|z1|^2|w1|^2 + |z2|^2|w2|^2 + 2 Re((z1 z2) conj(w1 w2))."""
    z1, z2 = _split(z)
    w1, w2 = _split(w)
    cross = oct_mul(oct_mul(z1, z2), oct_conj(oct_mul(w1, w2)))[..., 0]
    n = lambda x: np.sum(x**2, axis=-1)  # noqa: E731
    return n(z1) * n(w1) + n(z2) * n(w2) + 2 * cross


def psi_ca(z: ArrayLike, w: ArrayLike) -> Array:
    """Psi = Phi - 2 <z, w>_R + 1."""
    zz, ww = _arr(z), _arr(w)
    return phi_ca(zz, ww) - 2 * np.sum(zz * ww, axis=-1) + 1


def psi_ca_branch(z: ArrayLike, w: ArrayLike, tol: float = 1e-14) -> float:
    """Two-branch closed form of Psi for a single pair of points.

    w2 != 0: |1 - (conj(z1) w2)(w2^{-1} w1) - z2 conj(w2)|^2
    w2 == 0: |1 - conj(z1) w1|^2
    """
    z1, z2 = _split(z)
    w1, w2 = _split(w)
    one = np.zeros(8)
    one[0] = 1.0
    if norm(w2) < tol:
        x = one - oct_mul(oct_conj(z1), w1)
    else:
        x = one - oct_mul(oct_mul(oct_conj(z1), w2), oct_mul(oct_inv(w2), w1)) - oct_mul(z2, oct_conj(w2))
    return float(np.sum(x**2))


__all__ = [
    "Quaternion",
    "Octonion",
    "quat_mul",
    "quat_conj",
    "quat_inv",
    "norm",
    "oct_mul",
    "oct_conj",
    "oct_inv",
    "octonion_table",
    "herm_q",
    "q_to_complex",
    "complex_to_q",
    "phi_ca",
    "psi_ca",
    "psi_ca_branch",
]
