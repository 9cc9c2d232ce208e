"""Boundary integrals on a slice: inner products, Poisson and Cauchy reconstruction.

Boundary data is always a :class:`SliceBoundaryGrid`, i.e. samples of a
function at ``e^{I t_m}`` with ``t_m = 2 pi m / M``.  All integrals use the
uniform trapezoid rule, which converges geometrically for the analytic
periodic integrands produced by series with poles outside the closed ball.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .quat_core import (
    ATOL,
    DomainError,
    Quaternion,
    UnitImaginary,
    multiply,
    qconj,
    qinv,
    qmul,
    qnorm2,
    slice_decompose,
)
from .series import RegularSeries, eval_points, from_slice_complex, in_slice

DEFAULT_NODES = 1024
RADIAL_FALLBACK = 1.0 - 1e-6


class SingularKernelError(DomainError):
    """The regular Cauchy kernel is evaluated on its sphere of singularities."""


@dataclass(frozen=True)
class SliceBoundaryGrid:
    """Quaternion samples at ``e^{I t_m}``, ``t_m = 2 pi m / M``."""

    direction: UnitImaginary
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float).reshape(-1, 4)
        if vals.shape[0] < 2:
            raise DomainError("a boundary grid needs at least 2 nodes")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def size(self) -> int:
        return self.values.shape[0]

    @property
    def nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.size) / self.size

    def points(self) -> np.ndarray:
        """Boundary points as an ``(M, 4)`` quaternion array."""
        return from_slice_complex(np.exp(1j * self.nodes), self.direction)

    @classmethod
    def from_series(cls, f: RegularSeries, I: UnitImaginary, M: int = DEFAULT_NODES, radius: float = 1.0):
        z = radius * np.exp(2j * np.pi * np.arange(M) / M)
        return cls(I, eval_points(f.coeffs, from_slice_complex(z, I)))

    @classmethod
    def from_function(cls, func: Callable, I: UnitImaginary, M: int = DEFAULT_NODES, radius: float = 1.0):
        z = radius * np.exp(2j * np.pi * np.arange(M) / M)
        pts = from_slice_complex(z, I)
        return cls(I, np.array([Quaternion.coerce(func(Quaternion(*p))).as_array() for p in pts]))

    def to_csv(self) -> str:
        """Header line with the direction, then rows ``theta, w, x, y, z``."""
        buf = io.StringIO()
        d = self.direction
        buf.write(f"{d.x:.17g},{d.y:.17g},{d.z:.17g}\n")
        for t, v in zip(self.nodes, self.values):
            buf.write(",".join(f"{x:.17g}" for x in (t, *v)) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SliceBoundaryGrid":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].lstrip().startswith("#")]
        if not rows:
            raise DomainError("empty boundary file")
        header = [float(v) for v in rows[0]]
        if len(header) != 3:
            raise DomainError("boundary file must start with the slice direction as three floats")
        body = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
        if body.ndim != 2 or body.shape[1] != 5:
            raise DomainError("boundary rows must be theta, w, x, y, z")
        M = body.shape[0]
        expected = 2.0 * np.pi * np.arange(M) / M
        if not np.allclose(body[:, 0], expected, rtol=0.0, atol=1e-9):
            raise DomainError("boundary angles must be 2 pi m / M in increasing order")
        return cls(UnitImaginary.from_vector(header), body[:, 1:])


def _check_compatible(f: SliceBoundaryGrid, g: SliceBoundaryGrid):
    if f.size != g.size:
        raise DomainError(f"node counts differ: {f.size} vs {g.size}")
    if np.linalg.norm(f.direction.vector() - g.direction.vector()) > ATOL:
        raise DomainError("boundary grids live on different slices")


def inner_product_quadrature(f_samples: SliceBoundaryGrid, g_samples: SliceBoundaryGrid) -> Quaternion:
    """``(1/M) sum_m conj(g_m) f_m``."""
    _check_compatible(f_samples, g_samples)
    terms = qmul(qconj(g_samples.values), f_samples.values)
    return Quaternion.from_array(np.sum(terms, axis=0) / f_samples.size)


def boundary_norm(f_samples: SliceBoundaryGrid) -> float:
    return float(np.sqrt(np.sum(qnorm2(f_samples.values)) / f_samples.size))


def poisson_eval(boundary: SliceBoundaryGrid, r: float, theta: float) -> Quaternion:
    if not 0.0 <= r < 1.0:
        raise DomainError(f"Poisson reconstruction needs 0 <= r < 1, got r = {r!r}")
    d = theta - boundary.nodes
    kernel = (1.0 - r * r) / (1.0 - 2.0 * r * np.cos(d) + r * r)
    return Quaternion.from_array(kernel @ boundary.values / boundary.size)


def _slice_point(boundary: SliceBoundaryGrid, z) -> complex:
    z = Quaternion.coerce(z)
    I = boundary.direction
    if not in_slice(z, I):
        raise DomainError("point is not on the slice of the boundary data")
    zc = complex(z.w, float(z.imag @ I.vector()))
    if abs(zc) >= 1.0:
        raise DomainError(f"point must lie in the open unit disc of the slice, |z| = {abs(zc)!r}")
    return zc


def cauchy_slice_eval(boundary: SliceBoundaryGrid, z) -> Quaternion:
    """Slice Cauchy integral ``(2 pi I)^-1 sum (xi - z)^-1 dxi f(xi)``.

    With ``xi = e^{It}`` and ``dxi = I xi dt``; the prefactor is kept on the
    left of the integrand.
    """
    _slice_point(boundary, z)
    z = Quaternion.coerce(z).as_array()
    I = boundary.direction.as_array()
    xi = boundary.points()
    dt = 2.0 * np.pi / boundary.size
    dxi = qmul(I, xi) * dt
    integrand = qmul(qmul(dxi, qinv(xi - z)), boundary.values)
    pref = qinv(2.0 * np.pi * I)
    return Quaternion.from_array(qmul(pref, np.sum(integrand, axis=0)))


def _kernel_arrays(s: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Regular Cauchy kernel ``(q^2 - 2 Re(s) q + |s|^2)^-1 (conj(s) - q)`` on arrays."""
    s = np.asarray(s, dtype=float)
    q = np.asarray(q, dtype=float)
    sym = qmul(q, q) - 2.0 * s[..., :1] * q
    sym = sym + np.concatenate([qnorm2(s)[..., None], np.zeros(sym.shape[:-1] + (3,))], axis=-1)
    mag = np.sqrt(qnorm2(sym))
    if np.any(mag < 1e-12):
        raise SingularKernelError("regular Cauchy kernel is singular: q lies on the sphere of s")
    return qmul(qinv(sym), qconj(s) - q)


def cauchy_kernel(s, q) -> Quaternion:
    """``(s - q)^-*`` as a function of ``q``; the symmetrization has real coefficients."""
    s = Quaternion.coerce(s).as_array()
    q = Quaternion.coerce(q).as_array()
    return Quaternion.from_array(_kernel_arrays(s, q))


def regular_cauchy_eval(boundary: SliceBoundaryGrid, q) -> Quaternion:
    """Value at any ``q`` in the ball from boundary data on one slice.

    ``(1/2 pi) sum (s - q)^-* ds_I f(s)`` with ``ds_I = -I ds = e^{It} dt``.
    """
    q = Quaternion.coerce(q)
    if not q.norm() < 1.0 - 1e-9:
        raise DomainError(f"reconstruction point must satisfy |q| < 1 - 1e-9, got {q.norm()!r}")
    s = boundary.points()
    k = _kernel_arrays(s, q.as_array())
    integrand = qmul(qmul(k, s), boundary.values)
    return Quaternion.from_array(np.sum(integrand, axis=0) / boundary.size)


def extend_from_slice(F_I: Callable, I: UnitImaginary, q) -> Quaternion:
    """Regular extension of a holomorphic slice function to ``q = x + yJ``.

    ``f(x + yJ) = (F(x + yI) + F(x - yI))/2 + (J I / 2)(F(x - yI) - F(x + yI))``
    """
    q = Quaternion.coerce(q)
    x, y, J = slice_decompose(q, fallback=I)
    Iq = I.as_quaternion()
    zp = Quaternion(x) + Iq * y
    zm = Quaternion(x) - Iq * y
    fp = Quaternion.coerce(F_I(zp))
    fm = Quaternion.coerce(F_I(zm))
    JI = multiply(J.as_quaternion(), Iq) * 0.5
    return (fp + fm) * 0.5 + multiply(JI, fm - fp)


def poisson_at(boundary: SliceBoundaryGrid, z) -> Quaternion:
    """:func:`poisson_eval` at a point of the slice given as a quaternion."""
    zc = _slice_point(boundary, z)
    return poisson_eval(boundary, abs(zc), math.atan2(zc.imag, zc.real))
