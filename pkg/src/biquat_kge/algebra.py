"""Exact biquaternion and quaternion algebra.

A biquaternion is a hypercomplex number w + x*i + y*j + z*k whose four
coefficients w, x, y, z are complex.  The imaginary unit I of the
coefficients commutes with the quaternion units i, j, k, so every value
here is fully determined by eight reals.  The module provides the Hamilton
product, conjugations, the (complex-valued) norm, the 4x4 matrix
representation, and the factorization of a unit biquaternion's matrix into
a hyperbolic rotation times a circular rotation.

Everything is immutable and pure; all reals are 64-bit floats.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NotUnitError

#: |norm(q) - 1| above this is rejected by the factorizations.
UNIT_TOLERANCE = 1e-8

#: Below this, a factor norm is treated as degenerate (axis undefined).
DEGENERATE_EPS = 1e-12


@dataclass(frozen=True)
class Quaternion:
    """Real quaternion w + x*i + y*j + z*k."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        """Hamilton product, or scaling when ``other`` is a real number."""
        if isinstance(other, Quaternion):
            w1, x1, y1, z1 = self.w, self.x, self.y, self.z
            w2, x2, y2, z2 = other.w, other.x, other.y, other.z
            return Quaternion(
                w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            )
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other,
                              self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / other)
        return NotImplemented

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def vector_norm(self) -> float:
        """Norm of the vector part x*i + y*j + z*k."""
        return math.sqrt(self.x ** 2 + self.y ** 2 + self.z ** 2)

    def scalar_part(self) -> float:
        return self.w

    def to_biquaternion(self) -> "Biquaternion":
        return Biquaternion(complex(self.w), complex(self.x),
                            complex(self.y), complex(self.z))


@dataclass(frozen=True)
class Biquaternion:
    """Biquaternion w + x*i + y*j + z*k with complex coefficients."""

    w: complex = 0j
    x: complex = 0j
    y: complex = 0j
    z: complex = 0j

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def from_reals(cls, w_r, w_i, x_r, x_i, y_r, y_i, z_r, z_i) -> "Biquaternion":
        return cls(complex(w_r, w_i), complex(x_r, x_i),
                   complex(y_r, y_i), complex(z_r, z_i))

    @classmethod
    def from_quaternion_pair(cls, real: Quaternion, imag: Quaternion) -> "Biquaternion":
        """Assemble q = real + imag*I from its two quaternion views."""
        return cls(complex(real.w, imag.w), complex(real.x, imag.x),
                   complex(real.y, imag.y), complex(real.z, imag.z))

    @property
    def real_part(self) -> Quaternion:
        """Quaternion built from the real parts of the coefficients."""
        return Quaternion(self.w.real, self.x.real, self.y.real, self.z.real)

    @property
    def imag_part(self) -> Quaternion:
        """Quaternion built from the imaginary parts of the coefficients."""
        return Quaternion(self.w.imag, self.x.imag, self.y.imag, self.z.imag)

    def scalar_part(self) -> complex:
        return self.w

    def vector_part(self) -> "Biquaternion":
        return Biquaternion(0j, self.x, self.y, self.z)

    def __add__(self, other: "Biquaternion") -> "Biquaternion":
        return Biquaternion(self.w + other.w, self.x + other.x,
                            self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Biquaternion") -> "Biquaternion":
        return Biquaternion(self.w - other.w, self.x - other.x,
                            self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Biquaternion":
        return Biquaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        """Hamilton product; complex/real operands act as scalars."""
        if isinstance(other, Biquaternion):
            w1, x1, y1, z1 = self.w, self.x, self.y, self.z
            w2, x2, y2, z2 = other.w, other.x, other.y, other.z
            return Biquaternion(
                w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
            )
        if isinstance(other, (int, float, complex)):
            return Biquaternion(self.w * other, self.x * other,
                                self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            # Scalars commute with everything, so left scaling equals right.
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * (1.0 / other)
        return NotImplemented

    def conjugate(self) -> "Biquaternion":
        """Quaternion conjugate: negate the i, j, k coefficients."""
        return Biquaternion(self.w, -self.x, -self.y, -self.z)

    def complex_conjugate(self) -> "Biquaternion":
        """Complex conjugate of each coefficient."""
        return Biquaternion(self.w.conjugate(), self.x.conjugate(),
                            self.y.conjugate(), self.z.conjugate())

    def norm(self) -> complex:
        """Principal square root of w^2 + x^2 + y^2 + z^2.

        The result is complex in general and can be zero for nonzero
        inputs (biquaternions have zero divisors).
        """
        return complex_sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    def normalized(self) -> "Biquaternion":
        """q / norm(q); raises ValueError near the zero-divisor locus."""
        n = self.norm()
        if abs(n) < DEGENERATE_EPS:
            raise ValueError("cannot normalize: |norm| is numerically zero")
        return self / n

    def is_unit(self, tol: float = UNIT_TOLERANCE) -> bool:
        return abs(self.norm() - 1.0) <= tol

    def vector_rep(self) -> np.ndarray:
        """Coefficients as the complex column [w, x, y, z]."""
        return np.array([self.w, self.x, self.y, self.z], dtype=np.complex128)

    def matrix_rep(self) -> np.ndarray:
        """4x4 complex matrix M(q) with M(q1*q2) = M(q2) @ M(q1)."""
        w, x, y, z = self.w, self.x, self.y, self.z
        return np.array(
            [
                [w, -x, -y, -z],
                [x, w, z, -y],
                [y, -z, w, x],
                [z, y, -x, w],
            ],
            dtype=np.complex128,
        )

    def to_quaternion(self) -> Quaternion:
        """Strict down-cast; valid only when every coefficient is real."""
        if any(c.imag != 0.0 for c in (self.w, self.x, self.y, self.z)):
            raise ValueError("coefficients have nonzero imaginary parts")
        return self.real_part


def complex_sqrt(c: complex) -> complex:
    """Principal branch: Re >= 0, and Im >= 0 on the negative real axis."""
    return cmath.sqrt(complex(c))


def matrix_rep(q: Biquaternion) -> np.ndarray:
    return q.matrix_rep()


def matrix_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b


def matrix_transpose(a: np.ndarray) -> np.ndarray:
    """Plain transpose, no complex conjugation."""
    return a.T


def matrix_det(a: np.ndarray) -> complex:
    return complex(np.linalg.det(a))


@dataclass(frozen=True)
class Factorization:
    """Split of a unit biquaternion's matrix into rotation factors.

    ``u`` generates the circular factor and ``h`` the hyperbolic one;
    ``theta`` is the circular angle, ``phi`` the hyperbolic angle, and
    ``axis`` the unit direction of the hyperbolic factor.  ``degenerate``
    marks inputs where the axis (or the circular axis) is undefined; the
    reconstruction identity still holds there.
    """

    h: Biquaternion
    u: Quaternion
    theta: float
    phi: float
    axis: tuple[float, float, float]
    degenerate: bool = False


def _split_unit(q: Biquaternion, tol: float):
    """Common setup for both factorizations; enforces the unit precondition."""
    deviation = abs(q.norm() - 1.0)
    if deviation > tol:
        raise NotUnitError(
            f"|norm(q) - 1| = {deviation:.3e} exceeds tolerance {tol:.1e}; "
            "normalize the input first"
        )
    q_r = q.real_part
    q_i = q.imag_part
    return q_r, q_i, q_r.norm(), q_i.norm()


def _hyperbolic_factor(pure: Quaternion, nr: float, ni: float):
    """Build h = nr + I*(pure/nr) plus its axis (a, b, c).

    ``pure`` is the quaternion product whose normalized form gives the
    axis; for a unit input it is pure to machine precision, and the tiny
    scalar residue is kept so reconstruction stays exact.
    """
    h = Biquaternion.from_quaternion_pair(Quaternion(nr), pure / nr)
    if ni > 0.0:
        scale = 1.0 / (nr * ni)
        axis = (pure.x * scale, pure.y * scale, pure.z * scale)
    else:
        axis = (0.0, 0.0, 0.0)
    return h, axis


def _angles(q_r: Quaternion, nr: float) -> tuple[float, float]:
    theta = math.acos(max(-1.0, min(1.0, q_r.w / nr)))
    phi = math.acosh(max(1.0, nr))
    return theta, phi


def factorize(q: Biquaternion, tol: float = UNIT_TOLERANCE) -> Factorization:
    """Factor M(q) = M(h) @ M(u) for a unit biquaternion q.

    ``u = q_r / ||q_r||`` is a unit quaternion (circular rotation) and
    ``h = ||q_r|| + I * (conj(q_r) q_i) / ||q_r||`` is a unit biquaternion
    (hyperbolic rotation).  Raises NotUnitError when q is not unit within
    ``tol``.  When ``||q_i|| = 0`` the hyperbolic factor collapses to 1 and
    the axis is reported as zeros; when ``||v(q_r)|| = 0`` the circular
    factor is the scalar +-1.  Both cases set ``degenerate``.
    """
    q_r, q_i, nr, ni = _split_unit(q, tol)
    u = Quaternion(q_r.w / nr, q_r.x / nr, q_r.y / nr, q_r.z / nr)
    h, axis = _hyperbolic_factor(q_r.conjugate() * q_i, nr, ni)
    theta, phi = _angles(q_r, nr)
    degenerate = ni < DEGENERATE_EPS or q_r.vector_norm() < DEGENERATE_EPS
    return Factorization(h=h, u=u, theta=theta, phi=phi, axis=axis,
                         degenerate=degenerate)


def factorize_right(q: Biquaternion, tol: float = UNIT_TOLERANCE) -> Factorization:
    """Mirror factorization M(q) = M(u) @ M(h'); axis comes from q_i conj(q_r)."""
    q_r, q_i, nr, ni = _split_unit(q, tol)
    u = Quaternion(q_r.w / nr, q_r.x / nr, q_r.y / nr, q_r.z / nr)
    h, axis = _hyperbolic_factor(q_i * q_r.conjugate(), nr, ni)
    theta, phi = _angles(q_r, nr)
    degenerate = ni < DEGENERATE_EPS or q_r.vector_norm() < DEGENERATE_EPS
    return Factorization(h=h, u=u, theta=theta, phi=phi, axis=axis,
                         degenerate=degenerate)


def random_biquaternion(rng: np.random.Generator, scale: float = 1.0) -> Biquaternion:
    """Biquaternion with the eight reals drawn uniformly from [-scale, scale]."""
    r = rng.uniform(-scale, scale, size=8)
    return Biquaternion.from_reals(*r)


def random_unit_biquaternion(rng: np.random.Generator) -> Biquaternion:
    """Random biquaternion normalized to unit norm.

    Draws are rejected while |norm| < 0.3 to stay clear of the
    zero-divisor locus, where normalization is ill-conditioned.
    """
    while True:
        q = random_biquaternion(rng)
        if abs(q.norm()) >= 0.3:
            return q.normalized()
