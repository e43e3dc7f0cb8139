"""Quaternion scalars and conjugacy spheres.

A quaternion ``a + b i + c j + d k`` is stored by its four real components.
Every quaternion is conjugate (``p = s q s^-1``) to exactly the points of the
2-sphere ``Re(q) + |Im(q)| S`` where ``S`` is the sphere of unit imaginary
quaternions; such a sphere is stored as the pair ``(u, v)`` with ``v >= 0``.

All contour and eigenvalue work in this package happens in the slice plane
spanned by ``1`` and ``i``, so a sphere ``(u, v)`` is represented there by the
complex number ``u + v*1j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Quaternion",
    "ONE",
    "I",
    "J",
    "K",
    "EigenSphere",
    "mul",
    "conj",
    "norm",
    "re",
    "im",
    "inv",
    "sphere_of",
    "slice_point",
]


@dataclass(frozen=True)
class Quaternion:
    """Immutable quaternion ``a + b i + c j + d k``."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        a, b, c, d = (float(x) for x in arr)
        return cls(a, b, c, d)

    @classmethod
    def from_complex(cls, z: complex) -> "Quaternion":
        """Embed ``z = x + y*1j`` as ``x + y i``."""
        z = complex(z)
        return cls(z.real, z.imag, 0.0, 0.0)

    @classmethod
    def from_pair(cls, z1: complex, z2: complex) -> "Quaternion":
        """Build ``z1 + z2 j`` from two complex numbers of the (1, i) plane."""
        z1, z2 = complex(z1), complex(z2)
        return cls(z1.real, z1.imag, z2.real, z2.imag)

    def to_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=float)

    def to_list(self) -> list[float]:
        return [self.a, self.b, self.c, self.d]

    def to_pair(self) -> tuple[complex, complex]:
        """Return ``(z1, z2)`` with ``self = z1 + z2 j``."""
        return complex(self.a, self.b), complex(self.c, self.d)

    def is_real(self, tol: float = 0.0) -> bool:
        return math.sqrt(self.b**2 + self.c**2 + self.d**2) <= tol

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.a + other.a, self.b + other.b,
                          self.c + other.c, self.d + other.d)

    __radd__ = __add__

    def __neg__(self):
        return Quaternion(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    def __rmul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return mul(other, self)

    def __abs__(self):
        return norm(self)

    def __repr__(self):
        return f"Quaternion({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"


def _coerce(x):
    if isinstance(x, Quaternion):
        return x
    if isinstance(x, (int, float, np.integer, np.floating)):
        return Quaternion(float(x))
    if isinstance(x, (complex, np.complexfloating)):
        return Quaternion.from_complex(x)
    return NotImplemented


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    """Hamilton product ``p q``."""
    a1, b1, c1, d1 = p.a, p.b, p.c, p.d
    a2, b2, c2, d2 = q.a, q.b, q.c, q.d
    return Quaternion(
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    )


def conj(q: Quaternion) -> Quaternion:
    return Quaternion(q.a, -q.b, -q.c, -q.d)


def norm(q: Quaternion) -> float:
    return math.sqrt(q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d)


def re(q: Quaternion) -> float:
    return q.a


def im(q: Quaternion) -> Quaternion:
    return Quaternion(0.0, q.b, q.c, q.d)


def inv(q: Quaternion) -> Quaternion:
    """Multiplicative inverse ``conj(q) / |q|^2``.

    Raises
    ------
    ZeroDivisionError
        If ``q`` is zero ("zero divisor").
    """
    n2 = q.a * q.a + q.b * q.b + q.c * q.c + q.d * q.d
    if n2 == 0.0:
        raise ZeroDivisionError("zero divisor: quaternion 0 has no inverse")
    return Quaternion(q.a / n2, -q.b / n2, -q.c / n2, -q.d / n2)


@dataclass(frozen=True)
class EigenSphere:
    """Conjugacy sphere ``u + v S``; ``v == 0`` is a single real point."""

    u: float
    v: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))
        if self.v < 0:
            raise ValueError(f"sphere radius v must be >= 0, got {self.v}")

    @property
    def is_real(self) -> bool:
        return self.v == 0.0

    @property
    def modulus(self) -> float:
        """Common norm ``|q|`` of every point of the sphere."""
        return math.hypot(self.u, self.v)

    def representative(self) -> complex:
        return slice_point(self.u, self.v)

    def distance(self, other: "EigenSphere") -> float:
        """Max-coordinate distance used for sphere identification."""
        return max(abs(self.u - other.u), abs(self.v - other.v))

    def close_to(self, other: "EigenSphere", tol: float) -> bool:
        return self.distance(other) <= tol

    def contains(self, q: Quaternion, tol: float = 0.0) -> bool:
        return self.close_to(sphere_of(q), tol)


def sphere_of(q: Quaternion) -> EigenSphere:
    """The sphere ``[q] = Re(q) + |Im(q)| S``."""
    return EigenSphere(q.a, math.sqrt(q.b**2 + q.c**2 + q.d**2))


def slice_point(u: float, v: float) -> complex:
    """Upper half-plane representative ``u + v i`` of the sphere ``(u, v)``."""
    if v < 0:
        raise ValueError(f"slice_point needs v >= 0, got {v}")
    return complex(u, v)


def sphere_from_complex(z: complex) -> EigenSphere:
    """Sphere containing the slice point ``z`` (either half-plane)."""
    z = complex(z)
    return EigenSphere(z.real, abs(z.imag))
