"""Quaternion arithmetic.

Two layers live here.  ``Quaternion`` and ``UnitImaginary`` are small value
types for scalar work and for the public API.  The ``q*`` array helpers
operate on float arrays whose last axis holds ``(w, x, y, z)``; every bulk
computation in the package goes through them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EPS0 = 1e-12

_CONJ_SIGN = np.array([1.0, -1.0, -1.0, -1.0])


# -- array layer ---------------------------------------------------------------

def qmul(p, q):
    """Hamilton product of broadcastable arrays of shape (..., 4)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    w1, x1, y1, z1 = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    w2, x2, y2, z2 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    return np.stack(
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ],
        axis=-1,
    )


def qconj(q):
    return np.asarray(q, dtype=float) * _CONJ_SIGN


def qnorm(q):
    return np.sqrt(np.sum(np.asarray(q, dtype=float) ** 2, axis=-1))


def qinv(q):
    q = np.asarray(q, dtype=float)
    n2 = np.sum(q * q, axis=-1, keepdims=True)
    if np.any(np.sqrt(n2) <= EPS0):
        raise ZeroDivisionError("quaternion with norm below zero tolerance")
    return qconj(q) / n2


def imag_times(units, q):
    """Left product ``I * q`` with ``units`` given as (..., 3) imaginary parts."""
    units = np.asarray(units, dtype=float)
    pad = np.zeros(units.shape[:-1] + (1,))
    return qmul(np.concatenate([pad, units], axis=-1), q)


def left_matrix(q):
    """Real 4x4 matrix ``L`` with ``L(q) @ p == q * p``."""
    w, x, y, z = np.asarray(q, dtype=float)
    return np.array(
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    )


# -- value types ---------------------------------------------------------------

@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, a) -> Quaternion:
        w, x, y, z = (float(v) for v in np.asarray(a, dtype=float).reshape(4))
        return cls(w, x, y, z)

    @classmethod
    def real(cls, r: float) -> Quaternion:
        return cls(float(r))

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def to_json(self) -> list:
        return [self.w, self.x, self.y, self.z]

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def conj(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> Quaternion:
        return inverse(self)

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, UnitImaginary):
            other = other.as_quaternion()
        if isinstance(other, Quaternion):
            return mul(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            r = float(other)
            return Quaternion(self.w * r, self.x * r, self.y * r, self.z * r)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * (1.0 / float(other))
        return NotImplemented

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return (self - _coerce(other)).norm() <= tol

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _coerce(v):
    if isinstance(v, Quaternion):
        return v
    if isinstance(v, UnitImaginary):
        return v.as_quaternion()
    if isinstance(v, (int, float, np.floating, np.integer)):
        return Quaternion(float(v))
    return NotImplemented


ONE = Quaternion(1.0)
ZERO = Quaternion()
QI = Quaternion(0.0, 1.0)
QJ = Quaternion(0.0, 0.0, 1.0)
QK = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class UnitImaginary:
    """A point of the sphere of imaginary units; renormalized on construction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if n <= EPS0:
            raise ValueError("cannot normalize a zero vector to a unit imaginary")
        object.__setattr__(self, "x", float(self.x / n))
        object.__setattr__(self, "y", float(self.y / n))
        object.__setattr__(self, "z", float(self.z / n))

    @classmethod
    def from_vector(cls, v) -> UnitImaginary:
        x, y, z = (float(c) for c in np.asarray(v, dtype=float).reshape(3))
        return cls(x, y, z)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    def __neg__(self):
        return UnitImaginary(-self.x, -self.y, -self.z)

    def __mul__(self, other):
        return self.as_quaternion() * other

    def __rmul__(self, other):
        return _coerce(other) * self.as_quaternion()

    def angle_to(self, other: UnitImaginary) -> float:
        c = float(np.clip(self.vector @ other.vector, -1.0, 1.0))
        return math.acos(c)


UI = UnitImaginary(1.0, 0.0, 0.0)
UJ = UnitImaginary(0.0, 1.0, 0.0)
UK = UnitImaginary(0.0, 0.0, 1.0)


def random_unit_imaginary(rng: np.random.Generator) -> UnitImaginary:
    while True:
        v = rng.standard_normal(3)
        if np.linalg.norm(v) > 1e-6:
            return UnitImaginary.from_vector(v)


def random_units(rng: np.random.Generator, n: int) -> np.ndarray:
    """Array (n, 3) of unit vectors, uniform on the sphere."""
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


# -- operations ----------------------------------------------------------------

def mul(p: Quaternion, q: Quaternion) -> Quaternion:
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


def inverse(q: Quaternion) -> Quaternion:
    n2 = q.norm2()
    if math.sqrt(n2) <= EPS0:
        raise ZeroDivisionError(f"cannot invert {q!r}: norm below {EPS0}")
    return Quaternion(q.w / n2, -q.x / n2, -q.y / n2, -q.z / n2)


def dot_cross_decompose(K: UnitImaginary, J: UnitImaginary):
    """Split ``K*J`` as ``-<K, J> + K x J``.

    Returns the real scalar product and the (purely imaginary) cross product.
    """
    d = float(K.vector @ J.vector)
    c = np.cross(K.vector, J.vector)
    return d, Quaternion(0.0, *c)


def exp_unit(t: float, I: UnitImaginary) -> Quaternion:
    """``cos(t) + I sin(t)``."""
    s = math.sin(t)
    return Quaternion(math.cos(t), s * I.x, s * I.y, s * I.z)


def slice_decompose(q: Quaternion):
    """Write ``q = x + y I`` with ``y >= 0``.

    ``I`` is ``None`` for real ``q`` (any unit represents it).
    """
    v = q.vector
    y = float(np.linalg.norm(v))
    if y < EPS0:
        return q.w, 0.0, None
    return q.w, y, UnitImaginary.from_vector(v / y)
