"""Truncated slice regular power series.

A series ``f(q) = sum_n q**n a_n`` always carries its coefficients on the
RIGHT of the powers of ``q``.  Every routine in the package follows that
convention; coefficients are stored as an ``(N + 1, 4)`` float array.
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .quat_core import (
    ATOL,
    DomainError,
    Quaternion,
    UnitImaginary,
    qconj,
    qmul,
    qnorm2,
)

DEFAULT_MAX_DEGREE = 256
SYMMETRIZATION_TOL = 1e-13


class InvariantViolation(RuntimeError):
    """A quantity that is real (or zero) by theorem drifted beyond tolerance."""


def max_degree() -> int:
    """Global truncation cap; ``QUATMT_MAX_DEGREE`` overrides the default 256."""
    raw = os.environ.get("QUATMT_MAX_DEGREE")
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_DEGREE
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"QUATMT_MAX_DEGREE must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DomainError("QUATMT_MAX_DEGREE must be >= 1")
    return value


class RegularSeries:
    """Immutable truncated power series with quaternion coefficients on the right."""

    __slots__ = ("_c",)

    def __init__(self, coeffs):
        arr = _as_coeff_array(coeffs)
        arr.setflags(write=False)
        self._c = arr

    @classmethod
    def constant(cls, c) -> "RegularSeries":
        return cls([Quaternion.coerce(c).as_array()])

    @classmethod
    def monomial(cls, n: int, c=1.0) -> "RegularSeries":
        arr = np.zeros((n + 1, 4))
        arr[n] = Quaternion.coerce(c).as_array()
        return cls(arr)

    @classmethod
    def zeros(cls, degree: int) -> "RegularSeries":
        return cls(np.zeros((degree + 1, 4)))

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Truncation degree N (not the index of the last nonzero coefficient)."""
        return self._c.shape[0] - 1

    truncation_degree = degree

    def __len__(self):
        return self._c.shape[0]

    def __getitem__(self, n: int) -> Quaternion:
        return Quaternion.from_array(self._c[n])

    def quaternions(self) -> list[Quaternion]:
        return [Quaternion.from_array(row) for row in self._c]

    def is_real(self, tol: float = SYMMETRIZATION_TOL) -> bool:
        return bool(np.all(np.abs(self._c[:, 1:]) <= tol))

    def truncate(self, degree: int) -> "RegularSeries":
        return RegularSeries(_resize(self._c, degree))

    def padded(self, degree: int) -> np.ndarray:
        return _resize(self._c, degree)

    def __call__(self, q) -> Quaternion:
        return evaluate(self, q)

    def __add__(self, other: "RegularSeries") -> "RegularSeries":
        n = max(self.degree, other.degree)
        return RegularSeries(_resize(self._c, n) + _resize(other._c, n))

    def __sub__(self, other: "RegularSeries") -> "RegularSeries":
        n = max(self.degree, other.degree)
        return RegularSeries(_resize(self._c, n) - _resize(other._c, n))

    def __neg__(self):
        return RegularSeries(-self._c)

    def scale(self, s: float) -> "RegularSeries":
        return RegularSeries(self._c * float(s))

    def right_multiply(self, c) -> "RegularSeries":
        """Coefficientwise ``a_n c``, i.e. the series of ``f(q) c``."""
        return RegularSeries(qmul(self._c, Quaternion.coerce(c).as_array()))

    def left_multiply(self, c) -> "RegularSeries":
        """Coefficientwise ``c a_n``; equals ``c * f`` in the star algebra."""
        return RegularSeries(qmul(Quaternion.coerce(c).as_array(), self._c))

    def allclose(self, other: "RegularSeries", atol: float = ATOL) -> bool:
        n = max(self.degree, other.degree)
        return bool(np.allclose(_resize(self._c, n), _resize(other._c, n), rtol=0.0, atol=atol))

    def to_json(self) -> str:
        return series_to_json(self)

    def __eq__(self, other):
        if not isinstance(other, RegularSeries):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.array_equal(self._c, other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"RegularSeries(degree={self.degree}, coeffs={self._c.tolist()!r})"


def _as_coeff_array(coeffs) -> np.ndarray:
    if isinstance(coeffs, RegularSeries):
        return np.array(coeffs.coeffs, dtype=float)
    if isinstance(coeffs, np.ndarray) and coeffs.ndim == 2 and coeffs.shape[1] == 4:
        arr = np.array(coeffs, dtype=float)
    else:
        arr = np.array([Quaternion.coerce(c).as_array() for c in coeffs], dtype=float).reshape(-1, 4)
    if arr.shape[0] == 0:
        raise DomainError("a series needs at least one coefficient")
    if not np.all(np.isfinite(arr)):
        raise DomainError("series coefficients must be finite")
    return arr


def _resize(c: np.ndarray, degree: int) -> np.ndarray:
    out = np.zeros((degree + 1, 4))
    m = min(c.shape[0], degree + 1)
    out[:m] = c[:m]
    return out


def as_series(f) -> RegularSeries:
    return f if isinstance(f, RegularSeries) else RegularSeries(f)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def eval_points(coeffs: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Horner evaluation at an ``(..., 4)`` array of points.

    ``a_0 + q (a_1 + q (a_2 + ...))`` keeps every power of q on the left of
    its coefficient.
    """
    pts = np.asarray(pts, dtype=float)
    acc = np.broadcast_to(coeffs[-1], pts.shape).copy()
    for n in range(coeffs.shape[0] - 2, -1, -1):
        acc = qmul(pts, acc) + coeffs[n]
    return acc


def evaluate(f: RegularSeries, q) -> Quaternion:
    q = Quaternion.coerce(q)
    if q.norm() > 1.0 + ATOL:
        warnings.warn(
            f"evaluating a truncated series at |q| = {q.norm():.6g} > 1; truncation error is uncontrolled",
            RuntimeWarning,
            stacklevel=2,
        )
    return Quaternion.from_array(eval_points(f.coeffs, q.as_array()))


# ---------------------------------------------------------------------------
# star algebra
# ---------------------------------------------------------------------------

# Hamilton table: component r of a*b is sum of sign * a[s] * b[t]
_PRODUCT_TERMS = (
    ((0, 0, 1.0), (1, 1, -1.0), (2, 2, -1.0), (3, 3, -1.0)),
    ((0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, -1.0)),
    ((0, 2, 1.0), (1, 3, -1.0), (2, 0, 1.0), (3, 1, 1.0)),
    ((0, 3, 1.0), (1, 2, 1.0), (2, 1, -1.0), (3, 0, 1.0)),
)


def _qconvolve(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    n_out = a.shape[0] + b.shape[0] - 1
    out = np.zeros((n_out, 4))
    for r, terms in enumerate(_PRODUCT_TERMS):
        for s, t, sign in terms:
            out[:, r] += sign * np.convolve(a[:, s], b[:, t])
    return _resize(out, degree)


def star_product(f: RegularSeries, g: RegularSeries, degree: int | None = None) -> RegularSeries:
    """Regular product: coefficient n is ``sum_k a_k b_(n-k)`` in that order.

    The result is truncated to ``min(Nf + Ng, max_degree())`` unless an
    explicit ``degree`` is given.
    """
    f, g = as_series(f), as_series(g)
    if degree is None:
        degree = min(f.degree + g.degree, max_degree())
    return RegularSeries(_qconvolve(f.coeffs, g.coeffs, degree))


def star_power(f: RegularSeries, n: int, degree: int | None = None) -> RegularSeries:
    if n < 0:
        raise DomainError("negative star power; use regular_reciprocal")
    if degree is None:
        degree = min(f.degree * n, max_degree())
    out = RegularSeries.constant(1.0).truncate(degree)
    for _ in range(n):
        out = star_product(out, f, degree=degree)
    return out


def regular_conjugate(f: RegularSeries) -> RegularSeries:
    return RegularSeries(qconj(f.coeffs))


def symmetrization(f: RegularSeries, degree: int | None = None) -> RegularSeries:
    """``f * f^c``; real by theorem, so imaginary drift above 1e-13 is an error."""
    f = as_series(f)
    s = star_product(f, regular_conjugate(f), degree=degree)
    c = np.array(s.coeffs)
    scale = max(1.0, float(np.max(np.abs(c[:, 0]))))
    drift = float(np.max(np.abs(c[:, 1:])))
    if drift > SYMMETRIZATION_TOL * scale:
        raise InvariantViolation(f"symmetrization has imaginary part {drift:.3e}")
    c[:, 1:] = 0.0
    return RegularSeries(c)


def invert_real_series(s: RegularSeries, degree: int | None = None) -> RegularSeries:
    """Reciprocal of a real power series up to ``degree`` (default ``max_degree()``).

    Uses the recursion ``s_0 t_n = -sum_{k>=1} s_k t_(n-k)``.
    """
    s = as_series(s)
    if not s.is_real():
        raise DomainError("invert_real_series needs real coefficients")
    if degree is None:
        degree = max_degree()
    sr = s.coeffs[:, 0]
    if abs(sr[0]) <= 1e-12:
        raise DomainError("symmetrization vanishes at 0")
    t = np.zeros(degree + 1)
    t[0] = 1.0 / sr[0]
    m = sr.shape[0]
    for n in range(1, degree + 1):
        k = min(n, m - 1)
        if k == 0:
            break  # constant series: t stays zero past index 0
        t[n] = -np.dot(sr[1 : k + 1], t[n - k : n][::-1]) / sr[0]
    out = np.zeros((degree + 1, 4))
    out[:, 0] = t
    return RegularSeries(out)


def regular_reciprocal(f: RegularSeries, degree: int | None = None) -> RegularSeries:
    """``(f^s)^-1 f^c`` as a formal series truncated at ``degree``.

    Only requires ``f^s(0) != 0``; results are meaningful where the
    symmetrization has no zeros in the closed ball.
    """
    f = as_series(f)
    if not np.any(f.coeffs):
        raise DomainError("regular reciprocal of the zero series")
    if degree is None:
        degree = max_degree()
    t = invert_real_series(symmetrization(f, degree=degree), degree=degree)
    return star_product(t, regular_conjugate(f), degree=degree)


# ---------------------------------------------------------------------------
# Hardy space structure in coefficient space
# ---------------------------------------------------------------------------

def h2_norm(f: RegularSeries) -> float:
    return float(np.sqrt(np.sum(qnorm2(as_series(f).coeffs))))


def h2_inner_coeff(f: RegularSeries, g: RegularSeries) -> Quaternion:
    """``sum_n conj(b_n) a_n`` with ``a`` from ``f`` and ``b`` from ``g``."""
    f, g = as_series(f), as_series(g)
    m = min(f.degree, g.degree) + 1
    terms = qmul(qconj(g.coeffs[:m]), f.coeffs[:m])
    return Quaternion.from_array(np.sum(terms, axis=0))


# ---------------------------------------------------------------------------
# slice restriction (splitting)
# ---------------------------------------------------------------------------

def to_slice_complex(q: np.ndarray, I: UnitImaginary) -> np.ndarray:
    """Map ``(..., 4)`` points of L_I to complex numbers ``x + iy`` with ``q = x + yI``.

    Components orthogonal to I are dropped; callers check slice membership.
    """
    q = np.asarray(q, dtype=float)
    return q[..., 0] + 1j * (q[..., 1:] @ I.vector())


def from_slice_complex(z, I: UnitImaginary) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (4,))
    out[..., 0] = z.real
    out[..., 1:] = z.imag[..., None] * I.vector()
    return out


def in_slice(q, I: UnitImaginary, tol: float = ATOL) -> bool:
    v = Quaternion.coerce(q).imag
    perp = v - (v @ I.vector()) * I.vector()
    return float(np.linalg.norm(perp)) <= tol


@dataclass(frozen=True)
class ComplexSliceSeries:
    """Holomorphic slice function ``sum z**n c_n`` with ``c_n`` in L_I.

    ``coeffs`` is a complex array where ``1j`` stands for ``direction``.
    """

    coeffs: np.ndarray
    direction: UnitImaginary

    @property
    def degree(self) -> int:
        return self.coeffs.shape[0] - 1

    def eval_complex(self, z) -> np.ndarray:
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coeffs)

    def __call__(self, z) -> Quaternion:
        q = Quaternion.coerce(z)
        if not in_slice(q, self.direction):
            raise DomainError("evaluation point is not on the slice")
        zc = complex(to_slice_complex(q.as_array(), self.direction))
        return Quaternion.from_array(from_slice_complex(self.eval_complex(zc), self.direction))

    def as_regular(self) -> RegularSeries:
        return RegularSeries(from_slice_complex(self.coeffs, self.direction))


def restrict_to_slice(
    f: RegularSeries, I: UnitImaginary, J: UnitImaginary
) -> tuple[ComplexSliceSeries, ComplexSliceSeries]:
    """Split ``f`` on L_I as ``F(z) + G(z) J`` with F, G valued in L_I.

    Each coefficient is written in the basis ``1, I, J, IJ`` as
    ``(c0 + c1 I) + (c2 + c3 I) J``.
    """
    if abs(I.dot(J)) >= ATOL:
        raise DomainError("J must be orthogonal to I")
    f = as_series(f)
    u, v = I.vector(), J.vector()
    uv = np.cross(u, v)  # IJ for orthogonal units
    c = f.coeffs
    alpha = c[:, 0] + 1j * (c[:, 1:] @ u)
    beta = (c[:, 1:] @ v) + 1j * (c[:, 1:] @ uv)
    return ComplexSliceSeries(alpha, I), ComplexSliceSeries(beta, I)


def combine_split(F_vals: np.ndarray, G_vals: np.ndarray, I: UnitImaginary, J: UnitImaginary) -> np.ndarray:
    """Quaternion array for ``F + G J`` given complex values of F and G."""
    Fq = from_slice_complex(F_vals, I)
    Gq = from_slice_complex(G_vals, I)
    return Fq + qmul(Gq, J.as_array())


def split_values(values: np.ndarray, I: UnitImaginary, J: UnitImaginary) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of :func:`combine_split` for quaternion samples."""
    u, v = I.vector(), J.vector()
    uv = np.cross(u, v)
    values = np.asarray(values, dtype=float)
    im = values[..., 1:]
    return values[..., 0] + 1j * (im @ u), (im @ v) + 1j * (im @ uv)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def series_to_json(f: RegularSeries) -> str:
    """JSON array of ``[w, x, y, z]`` quadruples, lowest degree first."""
    return json.dumps([[float(v) for v in row] for row in f.coeffs])


def series_from_json(text: str) -> RegularSeries:
    data = json.loads(text)
    return series_from_list(data)


def series_from_list(data: Sequence[Iterable[float]]) -> RegularSeries:
    rows = []
    for row in data:
        row = list(row)
        if len(row) != 4:
            raise DomainError(f"series coefficient must be [w, x, y, z], got {row!r}")
        rows.append([float(v) for v in row])
    return RegularSeries(np.array(rows, dtype=float).reshape(-1, 4))
