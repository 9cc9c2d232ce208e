"""Blaschke factors on the quaternionic unit ball.

``classical_blaschke`` is the pointwise extension ``(1 - q conj(a))^-1 (q - a)``;
it is not slice regular.  The regular factor ``(1 - q conj(a))^-* * (q - a)`` is
available both as a truncated series and through the closed relation with the
classical factor composed with the conjugation map ``t_a``.  The closed form is
exact on the boundary sphere, where series truncation error is largest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quat_core import DomainError, Quaternion, inverse, multiply, qinv, qmul, qconj
from .series import RegularSeries, max_degree, regular_reciprocal, star_product


@dataclass(frozen=True)
class BlaschkeParam:
    a: Quaternion

    def __post_init__(self):
        a = Quaternion.coerce(self.a)
        if not a.norm() < 1.0:
            raise DomainError(f"Blaschke parameter must satisfy |a| < 1, got |a| = {a.norm()!r}")
        object.__setattr__(self, "a", a)

    @classmethod
    def coerce(cls, value) -> "BlaschkeParam":
        return value if isinstance(value, BlaschkeParam) else cls(Quaternion.coerce(value))


def classical_blaschke(a, q) -> Quaternion:
    a = BlaschkeParam.coerce(a).a
    q = Quaternion.coerce(q)
    return multiply(inverse(1.0 - multiply(q, a.conj())), q - a)


def t_a(a, q) -> Quaternion:
    """``(1 - q a)^-1 q (1 - q a)``; a rotation of ``q`` inside its own sphere."""
    a = BlaschkeParam.coerce(a).a
    q = Quaternion.coerce(q)
    m = 1.0 - multiply(q, a)
    return multiply(multiply(inverse(m), q), m)


def regular_blaschke_eval(a, q) -> Quaternion:
    a = BlaschkeParam.coerce(a)
    return classical_blaschke(a, t_a(a, q))


def regular_blaschke_points(a, pts: np.ndarray) -> np.ndarray:
    """Vectorized :func:`regular_blaschke_eval` over an ``(..., 4)`` array."""
    a = BlaschkeParam.coerce(a).a.as_array()
    pts = np.asarray(pts, dtype=float)
    one = np.array([1.0, 0.0, 0.0, 0.0])
    m = one - qmul(pts, a)
    t = qmul(qmul(qinv(m), pts), m)
    return qmul(qinv(one - qmul(t, qconj(a))), t - a)


def linear_factor(a) -> RegularSeries:
    """Series of ``q - a``."""
    a = BlaschkeParam.coerce(a).a
    return RegularSeries([-a.as_array(), np.array([1.0, 0.0, 0.0, 0.0])])


def denominator(a) -> RegularSeries:
    """Series of ``1 - q conj(a)``."""
    a = BlaschkeParam.coerce(a).a
    return RegularSeries([np.array([1.0, 0.0, 0.0, 0.0]), -a.conj().as_array()])


def cauchy_factor_series(a, degree: int | None = None) -> RegularSeries:
    """``(1 - q conj(a))^-*`` truncated at ``degree``."""
    return regular_reciprocal(denominator(a), degree=degree)


def regular_blaschke_series(a, N: int | None = None) -> RegularSeries:
    if N is None:
        N = max_degree()
    return star_product(cauchy_factor_series(a, N), linear_factor(a), degree=N)
