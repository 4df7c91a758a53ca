"""Ball models of the quaternionic hyperbolic spaces and the Cayley plane.

Geodesic radius and Euclidean radius are related by |z| = tanh(rho).  The
radial volume density is sinh^p(rho) cosh^q(rho) times the area of the unit
sphere of dimension N - 1, with (p, q) stored on the descriptor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate

from . import division_algebras as da
from .specfun import sphere_area

Array = NDArray[np.float64]


class Family(str, Enum):
    REAL = "real"
    QUATERNIONIC = "quaternionic"
    CAYLEY = "cayley"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        aliases = {"r": cls.REAL, "q": cls.QUATERNIONIC, "ca": cls.CAYLEY, "o": cls.CAYLEY}
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class SpaceDescriptor:
    family: Family
    m: int
    N: int
    Q: int
    rho: float
    p_sinh: int
    p_cosh: int

    @property
    def spectral_gap(self) -> float:
        return self.rho**2

    @property
    def sphere_area(self) -> float:
        return sphere_area(self.N - 1)

    def density(self, r: ArrayLike) -> Array:
        """Radial volume density including the sphere-area factor."""
        r = np.asarray(r, dtype=float)
        return self.sphere_area * np.sinh(r) ** self.p_sinh * np.cosh(r) ** self.p_cosh

    def log_density_derivative(self, r: ArrayLike) -> Array:
        r = np.asarray(r, dtype=float)
        return self.p_sinh / np.tanh(r) + self.p_cosh * np.tanh(r)


def space_descriptor(family: "str | Family", m: int) -> SpaceDescriptor:
    """Descriptor for H_R^m (m odd), H_Q^m, or the Cayley plane (m = 2)."""
    fam = Family.parse(family)
    if fam is Family.QUATERNIONIC:
        if m < 1:
            raise ValueError("quaternionic rank must be >= 1")
        return SpaceDescriptor(fam, m, 4 * m, 4 * m + 2, 2 * m + 1, 4 * m - 1, 3)
    if fam is Family.CAYLEY:
        if m != 2:
            raise ValueError("the Cayley hyperbolic plane has m = 2")
        return SpaceDescriptor(fam, 2, 16, 22, 11, 15, 7)
    if m < 1 or m % 2 == 0:
        raise ValueError("real hyperbolic spaces are supported in odd dimension")
    return SpaceDescriptor(fam, m, m, m - 1, (m - 1) / 2, m - 1, 0)


@dataclass
class RadialProfile:
    """A radial function rho -> value, vectorized over numpy arrays.

    ``decay_rate`` and ``decay_power`` describe the tail
    f ~ rho^power * exp(-rate * rho); ``support`` bounds a compactly supported
    profile and ``breakpoints`` lists the ends of its monotone pieces.
    """

    func: Callable[[Array], Array]
    decay_rate: float = 0.0
    decay_power: float = 0.0
    support: float = math.inf
    breakpoints: tuple[float, ...] = ()
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __call__(self, rho: ArrayLike) -> Array:
        rho = np.asarray(rho, dtype=float)
        out = np.asarray(self.func(rho), dtype=float)
        if math.isfinite(self.support):
            out = np.where(rho < self.support, out, 0.0)
        return out

    def on_grid(self, grid: ArrayLike) -> Array:
        key = tuple(np.asarray(grid, dtype=float).ravel().tolist())
        if key not in self._cache:
            self._cache[key] = self(np.asarray(grid, dtype=float))
        return self._cache[key]


# --- Moebius automorphisms and distances -----------------------------------

def _check_ball(*points: Array) -> None:
    for p in points:
        if np.sum(np.asarray(p) ** 2) >= 1.0:
            raise ValueError("point is not inside the unit ball")


def mobius(w: ArrayLike, z: ArrayLike) -> Array:
    """phi_w(z) on the quaternionic ball; points are (m, 4) arrays.

    phi_w(z) = (1 - <z,w>)^{-1} (w - P_w z - sqrt(1-|w|^2) Q_w z), with the
    quaternionic scalar acting from the left.
    """
    w, z = np.asarray(w, dtype=float), np.asarray(z, dtype=float)
    if w.shape[-1] != 4 or z.shape[-1] != 4:
        raise NotImplementedError("only the quaternionic automorphism is implemented")
    _check_ball(w, z)
    nw2 = float(np.sum(w * w))
    if nw2 == 0.0:
        return -z
    ip = da.herm_q(z, w)
    proj = da.quat_mul(ip, w) / nw2
    num = w - proj - math.sqrt(1.0 - nw2) * (z - proj)
    one = np.array([1.0, 0.0, 0.0, 0.0])
    return da.quat_mul(da.quat_inv(one - ip), num)


def cosh_dist(space: SpaceDescriptor, z: ArrayLike, w: ArrayLike) -> float:
    """cosh of the geodesic distance between two ball points."""
    z, w = np.asarray(z, dtype=float), np.asarray(w, dtype=float)
    _check_ball(z, w)
    scale = math.sqrt((1 - np.sum(z * z)) * (1 - np.sum(w * w)))
    if space.family is Family.QUATERNIONIC:
        one = np.array([1.0, 0.0, 0.0, 0.0])
        return float(da.norm(one - da.herm_q(z, w)) / scale)
    if space.family is Family.CAYLEY:
        return float(math.sqrt(da.psi_ca(z.ravel(), w.ravel())) / scale)
    raise NotImplementedError("distance formula available for quaternionic and Cayley balls")


def sinh_dist_q(z: ArrayLike, w: ArrayLike) -> float:
    """sinh of the distance via |z-w|^2 + |<z,w>|^2 - |z|^2|w|^2."""
    z, w = np.asarray(z, dtype=float), np.asarray(w, dtype=float)
    _check_ball(z, w)
    z2, w2 = np.sum(z * z), np.sum(w * w)
    num = np.sum((z - w) ** 2) + np.sum(da.herm_q(z, w) ** 2) - z2 * w2
    return float(math.sqrt(max(num, 0.0) / ((1 - z2) * (1 - w2))))


# --- volumes ---------------------------------------------------------------

def ball_volume(space: SpaceDescriptor, rho: float) -> float:
    """Volume of the geodesic ball of radius rho."""
    if rho < 0:
        raise ValueError("radius must be nonnegative")
    if rho == 0:
        return 0.0
    return space.sphere_area * rho**space.N / space.N * small_ball_ratio(space, rho)


def small_ball_ratio(space: SpaceDescriptor, rho: float) -> float:
    """|B_rho| divided by its Euclidean-like leading term omega rho^N / N.

    Written as N * int_0^1 s^{N-1} (sinh(rho s)/(rho s))^p cosh^q(rho s) ds so
    that ratio - 1 stays accurate when rho is tiny.
    """
    p, q, n = space.p_sinh, space.p_cosh, space.N

    def integrand(s: float) -> float:
        x = rho * s
        sx = math.sinh(x) / x if x > 0 else 1.0
        return s ** (n - 1) * sx**p * math.cosh(x) ** q

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return n * val


def small_ball_excess(space: SpaceDescriptor, rho: float) -> float:
    """ratio - 1 computed without cancellation, via expm1 of the log integrand."""
    p, q, n = space.p_sinh, space.p_cosh, space.N

    def integrand(s: float) -> float:
        x = rho * s
        if x == 0:
            return 0.0
        log_sx = math.log(math.sinh(x) / x) if x > 1e-4 else x * x / 6 - x**4 / 180
        return s ** (n - 1) * math.expm1(p * log_sx + q * math.log(math.cosh(x)))

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return n * val


def log_ball_volume(space: SpaceDescriptor, rho: float) -> float:
    """log|B_rho|, stable for large rho (the density is integrated in log form)."""
    p, q = space.p_sinh, space.p_cosh
    top = p * (rho + math.log1p(-math.exp(-2 * rho)) - math.log(2)) + q * (rho + math.log1p(math.exp(-2 * rho)) - math.log(2))

    def scaled(r: float) -> float:
        if r <= 0:
            return 0.0
        log_s = r + math.log1p(-math.exp(-2 * r)) - math.log(2)
        log_c = r + math.log1p(math.exp(-2 * r)) - math.log(2)
        return math.exp(p * log_s + q * log_c - top)

    pts = [max(rho - 1.0, 0.0)] if rho > 1 else None
    val, _ = integrate.quad(scaled, 0.0, rho, epsabs=0.0, epsrel=1e-12, limit=400, points=pts)
    return math.log(space.sphere_area) + top + math.log(val)


# --- Laplacians ------------------------------------------------------------

def radial_laplacian(space: SpaceDescriptor, f: Callable[[Array], Array], rho: float, h: float = 1e-4) -> float:
    """f'' + (log density)' f' by central differences."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    h = min(h, rho / 2)
    pts = np.array([rho - h, rho, rho + h])
    fm, f0, fp = np.asarray(f(pts), dtype=float)
    d1 = (fp - fm) / (2 * h)
    d2 = (fp - 2 * f0 + fm) / (h * h)
    return float(d2 + space.log_density_derivative(rho) * d1)


def laplace_beltrami_q(f: Callable[[NDArray[np.complex128]], Array], z: ArrayLike, h: float | None = None) -> float:
    """Laplace-Beltrami operator of H_Q^m in the complex coordinates of C^{2m}.

    ``f`` maps complex arrays of shape (..., 2m) to reals.  Second derivatives
    come from a central-difference Hessian in the real coordinates; the
    Wirtinger combinations d_{z_a} d_{zbar_b} are assembled from it.
    """
    z = np.asarray(z, dtype=complex)
    n2 = z.shape[-1]
    if n2 % 2:
        raise ValueError("complex dimension must be even")
    m = n2 // 2
    r2 = float(np.sum(np.abs(z) ** 2))
    if r2 >= 1:
        raise ValueError("point is not inside the unit ball")
    if h is None:
        h = 1e-5 * max(1.0, math.sqrt(r2))
    x = np.concatenate([z.real, z.imag])
    n = x.size
    eye = np.eye(n) * h

    # all stencil points in one batch: (+a+b, +a-b, -a+b, -a-b) and (+a, -a)
    ia, ib = np.triu_indices(n)
    offs = np.concatenate(
        [
            eye[ia] + eye[ib],
            eye[ia] - eye[ib],
            -eye[ia] + eye[ib],
            -eye[ia] - eye[ib],
            eye,
            -eye,
        ]
    )
    pts = x + offs
    vals = np.asarray(f(pts[:, :n2] + 1j * pts[:, n2:]), dtype=float)
    k = ia.size
    hess_flat = (vals[:k] - vals[k : 2 * k] - vals[2 * k : 3 * k] + vals[3 * k : 4 * k]) / (4 * h * h)
    grad = (vals[4 * k : 4 * k + n] - vals[4 * k + n :]) / (2 * h)
    H = np.zeros((n, n))
    H[ia, ib] = hess_flat
    H[ib, ia] = hess_flat

    def wirt(a: int, b: int) -> complex:
        return 0.25 * (H[a, b] + H[n2 + a, n2 + b] + 1j * (H[a, n2 + b] - H[n2 + a, b]))

    zb = z.conj()
    total = 0j
    for i in range(m):
        for j in range(m):
            d = 1.0 if i == j else 0.0
            total += (d - z[i] * zb[j] - zb[m + i] * z[m + j]) * wirt(i, j)
            total += (zb[i] * z[m + j] - z[m + i] * zb[j]) * wirt(m + i, j)
            total += (zb[m + i] * z[j] - z[i] * zb[m + j]) * wirt(i, m + j)
            total += (d - zb[i] * z[j] - z[m + i] * zb[m + j]) * wirt(m + i, m + j)
    euler = float(np.dot(x, grad))  # (R + Rbar) f for real f
    return float(4 * (1 - r2) * (total.real + euler))


# --- eigenfunctions --------------------------------------------------------

def eigenfunction(space: SpaceDescriptor, lam: float, sigma: ArrayLike, z: ArrayLike) -> Array | NDArray[np.complex128]:
    """e_{lam,sigma}(z) = X^{(rho_X + i lam)/2} with X the Poisson-kernel base.

    Quaternionic points are (..., m, 4) arrays, Cayley points (..., 16).  The
    base X is a positive real, so the complex power is the principal one; for
    lam = 0 the value is real.
    """
    z = np.asarray(z, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if space.family is Family.QUATERNIONIC:
        r2 = np.sum(z * z, axis=(-2, -1))
        one = np.array([1.0, 0.0, 0.0, 0.0])
        den = np.sum((one - da.herm_q(z, sigma)) ** 2, axis=-1)
    elif space.family is Family.CAYLEY:
        r2 = np.sum(z * z, axis=-1)
        den = da.psi_ca(z, sigma)
    else:
        raise NotImplementedError("eigenfunctions are provided for quaternionic and Cayley balls")
    if np.any(r2 >= 1):
        raise ValueError("point is not inside the unit ball")
    base = (1 - r2) / den
    if lam == 0:
        return base ** (space.rho / 2)
    return np.exp(0.5 * (space.rho + 1j * lam) * np.log(base))


def eigenfunction_complex_coords(space: SpaceDescriptor, sigma: ArrayLike) -> Callable[[NDArray[np.complex128]], Array]:
    """e_{0,sigma} as a function of complex coordinates, for laplace_beltrami_q."""
    sigma = np.asarray(sigma, dtype=float)

    def f(zc: NDArray[np.complex128]) -> Array:
        return eigenfunction(space, 0.0, sigma, da.complex_to_q(zc))

    return f


# --- sampling --------------------------------------------------------------

def sample_sphere(d: int, seed: int | np.random.Generator, size: int | None = None) -> Array:
    """Uniform points on the unit sphere S^{d-1} of R^d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    shape = (d,) if size is None else (size, d)
    x = rng.standard_normal(shape)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


__all__ = [
    "Family",
    "SpaceDescriptor",
    "RadialProfile",
    "space_descriptor",
    "mobius",
    "cosh_dist",
    "sinh_dist_q",
    "ball_volume",
    "small_ball_ratio",
    "small_ball_excess",
    "log_ball_volume",
    "radial_laplacian",
    "laplace_beltrami_q",
    "eigenfunction",
    "eigenfunction_complex_coords",
    "sample_sphere",
]
