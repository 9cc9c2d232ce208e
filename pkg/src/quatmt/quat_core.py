"""Quaternion arithmetic, slice geometry and Haar quadrature on the unit 3-sphere.

Two layers live here.  ``Quaternion`` and ``UnitImaginary`` are small immutable
values for the public API.  The ``q*`` array helpers operate on float arrays
whose last axis holds ``(w, x, y, z)`` and are what the series and quadrature
code uses internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np

ATOL = 1e-12
REAL_TOL = 1e-14


class DomainError(ValueError):
    """Raised when an argument lies outside an operation's domain."""


# ---------------------------------------------------------------------------
# array layer
# ---------------------------------------------------------------------------

def qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product of broadcastable ``(..., 4)`` arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a1, a2, a3, a4 = a[..., 0], a[..., 1], a[..., 2], a[..., 3]
    b1, b2, b3, b4 = b[..., 0], b[..., 1], b[..., 2], b[..., 3]
    return np.stack(
        [
            a1 * b1 - a2 * b2 - a3 * b3 - a4 * b4,
            a1 * b2 + a2 * b1 + a3 * b4 - a4 * b3,
            a1 * b3 - a2 * b4 + a3 * b1 + a4 * b2,
            a1 * b4 + a2 * b3 - a3 * b2 + a4 * b1,
        ],
        axis=-1,
    )


def qconj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def qnorm2(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return np.sum(a * a, axis=-1)


def qabs(a: np.ndarray) -> np.ndarray:
    return np.sqrt(qnorm2(a))


def qinv(a: np.ndarray) -> np.ndarray:
    n2 = qnorm2(a)
    if np.any(n2 == 0.0):
        raise DomainError("inverse of the zero quaternion")
    return qconj(a) / n2[..., None]


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Quaternion:
    """Quaternion ``w + x i + y j + z k``."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"non-finite quaternion component {name}={v}")
            object.__setattr__(self, name, v)

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = (float(v) for v in np.asarray(arr, dtype=float).reshape(4))
        return cls(w, x, y, z)

    @classmethod
    def coerce(cls, value) -> "Quaternion":
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, UnitImaginary):
            return value.as_quaternion()
        if isinstance(value, (int, float)):
            return cls(float(value))
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls.from_array(value)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)

    __abs__ = norm

    def inverse(self) -> "Quaternion":
        return inverse(self)

    def is_close(self, other, atol: float = ATOL) -> bool:
        return is_close(self, other, atol=atol)

    def __add__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            s = float(other)
            return Quaternion(self.w * s, self.x * s, self.y * s, self.z * s)
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return multiply(self, o)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return multiply(o, self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return self * (1.0 / float(other))
        return NotImplemented

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


def _maybe(value):
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, UnitImaginary):
        return value.as_quaternion()
    if isinstance(value, (int, float)):
        return Quaternion(float(value))
    return None


ONE = Quaternion(1.0)
ZERO = Quaternion()
QI = Quaternion(0.0, 1.0)
QJ = Quaternion(0.0, 0.0, 1.0)
QK = Quaternion(0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class UnitImaginary:
    """Purely imaginary unit quaternion ``x i + y j + z k``; renormalized on construction."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        v = np.array([self.x, self.y, self.z], dtype=float)
        n = float(np.linalg.norm(v))
        if not math.isfinite(n) or n < 1e-300:
            raise DomainError("unit imaginary needs a nonzero finite direction")
        if abs(n - 1.0) <= 4 * np.finfo(float).eps:
            return  # already unit; keeps serialized directions round-trip exact
        v = v / n
        object.__setattr__(self, "x", float(v[0]))
        object.__setattr__(self, "y", float(v[1]))
        object.__setattr__(self, "z", float(v[2]))

    @classmethod
    def from_vector(cls, vec: Iterable[float]) -> "UnitImaginary":
        x, y, z = (float(c) for c in vec)
        return cls(x, y, z)

    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array([0.0, self.x, self.y, self.z])

    def dot(self, other: "UnitImaginary") -> float:
        return float(self.x * other.x + self.y * other.y + self.z * other.z)

    def __neg__(self):
        return UnitImaginary(-self.x, -self.y, -self.z)

    def __repr__(self):
        return f"UnitImaginary({self.x!r}, {self.y!r}, {self.z!r})"


UNIT_I = UnitImaginary(1.0, 0.0, 0.0)
UNIT_J = UnitImaginary(0.0, 1.0, 0.0)
UNIT_K = UnitImaginary(0.0, 0.0, 1.0)


class SliceCoordinate(NamedTuple):
    """``q = x + y * direction`` with ``y >= 0``."""

    x: float
    y: float
    direction: UnitImaginary

    def to_quaternion(self) -> Quaternion:
        d = self.direction
        return Quaternion(self.x, self.y * d.x, self.y * d.y, self.y * d.z)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def multiply(a: Quaternion, b: Quaternion) -> Quaternion:
    a1, a2, a3, a4 = a.w, a.x, a.y, a.z
    b1, b2, b3, b4 = b.w, b.x, b.y, b.z
    return Quaternion(
        a1 * b1 - a2 * b2 - a3 * b3 - a4 * b4,
        a1 * b2 + a2 * b1 + a3 * b4 - a4 * b3,
        a1 * b3 - a2 * b4 + a3 * b1 + a4 * b2,
        a1 * b4 + a2 * b3 - a3 * b2 + a4 * b1,
    )


def conj(q: Quaternion) -> Quaternion:
    return q.conj()


def inverse(q: Quaternion) -> Quaternion:
    n2 = q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z
    if n2 == 0.0:
        raise DomainError("inverse of the zero quaternion")
    return Quaternion(q.w / n2, -q.x / n2, -q.y / n2, -q.z / n2)


def is_close(a, b, atol: float = ATOL) -> bool:
    """Absolute tolerance, relaxed to relative when the magnitudes exceed 1."""
    a = Quaternion.coerce(a)
    b = Quaternion.coerce(b)
    scale = max(1.0, a.norm(), b.norm())
    return (a - b).norm() <= atol * scale


def exp_slice(theta: float, I: UnitImaginary) -> Quaternion:
    """``cos(theta) + I sin(theta)``."""
    c, s = math.cos(theta), math.sin(theta)
    return Quaternion(c, s * I.x, s * I.y, s * I.z)


def unit_from_spherical(theta2: float, theta3: float) -> UnitImaginary:
    return UnitImaginary(
        math.cos(theta2),
        math.sin(theta2) * math.cos(theta3),
        math.sin(theta2) * math.sin(theta3),
    )


def slice_decompose(q: Quaternion, fallback: UnitImaginary = UNIT_I) -> SliceCoordinate:
    v = q.imag
    y = float(np.linalg.norm(v))
    if y < REAL_TOL:
        return SliceCoordinate(q.w, 0.0, fallback)
    return SliceCoordinate(q.w, y, UnitImaginary.from_vector(v / y))


def orthogonal_unit(I: UnitImaginary) -> UnitImaginary:
    """Deterministic unit imaginary orthogonal to ``I``.

    Takes the first of ``i, j, k`` whose dot product with ``I`` has magnitude
    below 0.9 and removes its component along ``I``.
    """
    u = I.vector()
    for cand in np.eye(3):
        d = float(cand @ u)
        if abs(d) < 0.9:
            v = cand - d * u
            return UnitImaginary.from_vector(v / np.linalg.norm(v))
    raise AssertionError("unreachable: some axis has |dot| < 0.9 with a unit vector")


def rotate(q: Quaternion, v: Quaternion) -> Quaternion:
    """``q v conj(q)`` for unit ``q`` and purely imaginary ``v``."""
    if abs(q.norm() - 1.0) > ATOL:
        raise DomainError(f"rotation needs a unit quaternion, |q| = {q.norm()!r}")
    if abs(v.w) > ATOL * max(1.0, v.norm()):
        raise DomainError("rotated quaternion must be purely imaginary")
    return multiply(multiply(q, v), q.conj())


# total weight over these ranges: the area of the unit 3-sphere
OMEGA3 = 2.0 * math.pi ** 2


def haar_integral(
    f: Callable,
    grid: tuple[int, int, int] = (64, 64, 64),
    vectorized: bool = False,
) -> float:
    """Normalized Haar integral over the unit 3-sphere, composite midpoint rule.

    The sphere is parametrized by ``q = cos t1 + I(t2, t3) sin t1`` with
    weight ``sin(t1)**2 sin(t2)``, ``t1, t2`` in ``[0, pi]`` and ``t3`` in
    ``[0, 2 pi)``.  The ``t2`` direction uses midpoints in ``u = cos t2`` so
    that ``sin(t2) dt2 = -du`` is integrated exactly.

    With ``vectorized=True`` ``f`` receives an ``(n, 4)`` array and must
    return ``n`` reals; otherwise it is called once per node with a
    ``Quaternion``.
    """
    n1, n2, n3 = (int(n) for n in grid)
    if min(n1, n2, n3) < 2:
        raise DomainError("each grid dimension must be at least 2")
    t1 = (np.arange(n1) + 0.5) * (math.pi / n1)
    u = -1.0 + (np.arange(n2) + 0.5) * (2.0 / n2)
    t3 = (np.arange(n3) + 0.5) * (2.0 * math.pi / n3)
    T1, U, T3 = np.meshgrid(t1, u, t3, indexing="ij")
    s1 = np.sin(T1)
    s2 = np.sqrt(1.0 - U * U)
    pts = np.stack(
        [np.cos(T1), s1 * U, s1 * s2 * np.cos(T3), s1 * s2 * np.sin(T3)],
        axis=-1,
    ).reshape(-1, 4)
    weight = (s1 ** 2).reshape(-1)
    if vectorized:
        vals = np.asarray(f(pts), dtype=float).reshape(-1)
    else:
        vals = np.array([float(f(Quaternion(*p))) for p in pts])
    cell = (math.pi / n1) * (2.0 / n2) * (2.0 * math.pi / n3)
    return float(np.sum(vals * weight) * cell / OMEGA3)
