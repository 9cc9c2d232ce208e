"""The slice regular Malmquist-Takenaka system.

``Phi_1 = sqrt(1 - |a_1|^2) (1 - q conj(a_1))^-*`` and for ``k >= 2``
``Phi_k = sqrt(1 - |a_k|^2) (B_a1 * ... * B_a(k-1)) * (1 - q conj(a_k))^-*``,
all products being regular (star) products.  With every pole at the origin
``Phi_k(q) = q**(k-1)``; with a constant pole the system is the regular
discrete Laguerre system.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .blaschke import (
    BlaschkeParam,
    cauchy_factor_series,
    classical_blaschke,
    linear_factor,
    regular_blaschke_series,
)
from .quat_core import (
    ATOL,
    DomainError,
    Quaternion,
    UnitImaginary,
    exp_slice,
    inverse,
    multiply,
)
from .series import (
    RegularSeries,
    from_slice_complex,
    h2_inner_coeff,
    in_slice,
    max_degree,
    star_power,
    star_product,
    to_slice_complex,
)

DEFAULT_NODES = 1024


@dataclass(frozen=True)
class PoleSequence:
    """Ordered poles ``a_1, a_2, ...`` in the open unit ball.

    When ``common_slice`` is set every pole must lie on ``L_I`` (real poles
    lie on every slice).
    """

    params: tuple
    common_slice: Optional[UnitImaginary] = None

    def __post_init__(self):
        params = tuple(BlaschkeParam.coerce(p).a for p in self.params)
        object.__setattr__(self, "params", params)
        I = self.common_slice
        if I is not None:
            for k, a in enumerate(params, start=1):
                if not in_slice(a, I):
                    raise DomainError(f"pole a_{k} = {a!r} is not on the declared common slice")

    @classmethod
    def on_slice(cls, radii: Sequence[float], angles: Sequence[float], I: UnitImaginary) -> "PoleSequence":
        """Poles ``r_k e^{I theta_k}``."""
        return cls(tuple(exp_slice(t, I) * float(r) for r, t in zip(radii, angles)), I)

    @classmethod
    def constant(cls, a, n: int, I: Optional[UnitImaginary] = None) -> "PoleSequence":
        return cls((Quaternion.coerce(a),) * n, I)

    def detect_slice(self, fallback: Optional[UnitImaginary] = None) -> Optional[UnitImaginary]:
        """A slice containing every pole, or None if the poles span several slices."""
        direction = None
        for a in self.params:
            v = a.imag
            nv = float(np.linalg.norm(v))
            if nv < ATOL:
                continue
            if direction is None:
                direction = UnitImaginary.from_vector(v / nv)
            elif not in_slice(a, direction):
                return None
        if direction is None:
            return fallback
        return direction

    def with_slice(self, I: Optional[UnitImaginary]) -> "PoleSequence":
        return PoleSequence(self.params, I)

    def __len__(self):
        return len(self.params)

    def __getitem__(self, k):
        return self.params[k]

    def to_json(self) -> str:
        I = self.common_slice
        return json.dumps(
            {
                "poles": [list(a.as_tuple()) for a in self.params],
                "slice": None if I is None else [I.x, I.y, I.z],
            }
        )

    @classmethod
    def from_dict(cls, data: dict) -> "PoleSequence":
        if "poles" not in data:
            raise DomainError("pole file needs a 'poles' entry")
        poles = []
        for row in data["poles"]:
            row = list(row)
            if len(row) != 4:
                raise DomainError(f"pole must be [w, x, y, z], got {row!r}")
            poles.append(Quaternion(*row))
        raw = data.get("slice")
        I = None if raw is None else UnitImaginary.from_vector(raw)
        return cls(tuple(poles), I)

    @classmethod
    def from_json(cls, text: str) -> "PoleSequence":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class MTSystem:
    poles: PoleSequence
    basis: tuple
    truncation_degree: int

    def __len__(self):
        return len(self.basis)

    @property
    def n(self) -> int:
        return len(self.basis)

    def __getitem__(self, k: int) -> RegularSeries:
        """1-based access: ``sys[1]`` is Phi_1."""
        if not 1 <= k <= len(self.basis):
            raise IndexError(f"basis index {k} outside 1..{len(self.basis)}")
        return self.basis[k - 1]

    def slice(self) -> UnitImaginary:
        if self.poles.common_slice is None:
            raise DomainError("this operation needs a pole sequence with a common slice")
        return self.poles.common_slice

    def truncated(self, n: int) -> "MTSystem":
        return MTSystem(self.poles, self.basis[:n], self.truncation_degree)


def _norm_factor(a: Quaternion) -> float:
    return math.sqrt(1.0 - a.norm() ** 2)


def build_mt(poles: PoleSequence, n: Optional[int] = None, N: Optional[int] = None) -> MTSystem:
    if n is None:
        n = len(poles)
    if n < 1:
        raise DomainError("an M-T system needs n >= 1")
    if n > len(poles):
        raise DomainError(f"requested {n} basis functions from {len(poles)} poles")
    if N is None:
        N = max_degree()
    prefix = RegularSeries.constant(1.0).truncate(N)
    basis = []
    for k in range(n):
        a = poles[k]
        phi = star_product(prefix, cauchy_factor_series(a, N), degree=N).scale(_norm_factor(a))
        basis.append(phi)
        if k + 1 < n:
            prefix = star_product(prefix, regular_blaschke_series(a, N), degree=N)
    return MTSystem(poles, tuple(basis), N)


def laguerre_closed_form(a, n: int, N: Optional[int] = None) -> RegularSeries:
    """``sqrt(1 - |a|^2) (q - a)^{*n} * (1 - q conj(a))^{-*(n + 1)}``.

    ``n`` counts Blaschke factors, so ``n = 0`` is Phi_1 of the constant-pole system.
    """
    if n < 0:
        raise DomainError("Laguerre index must be >= 0")
    if N is None:
        N = max_degree()
    a = BlaschkeParam.coerce(a).a
    num = star_power(linear_factor(a), n, degree=N)
    den = star_power(cauchy_factor_series(a, N), n + 1, degree=N)
    return star_product(num, den, degree=N).scale(_norm_factor(a))


# ---------------------------------------------------------------------------
# closed-form evaluation on the common slice
# ---------------------------------------------------------------------------

def slice_poles(poles: PoleSequence, I: UnitImaginary) -> np.ndarray:
    return np.array([complex(to_slice_complex(a.as_array(), I)) for a in poles.params], dtype=complex)


def slice_values(sys: MTSystem, k: int, z) -> np.ndarray:
    """Complex values of Phi_k at complex points ``z`` of the common slice.

    Uses the pointwise product of classical factors, which agrees with the
    star product on a slice containing every pole.  No truncation.
    """
    sys.slice()
    if not 1 <= k <= len(sys.basis):
        raise IndexError(f"basis index {k} outside 1..{len(sys.basis)}")
    a = slice_poles(sys.poles, sys.poles.common_slice)[:k]
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, math.sqrt(1.0 - abs(a[-1]) ** 2), dtype=complex)
    for aj in a[:-1]:
        out = out * (z - aj) / (1.0 - np.conj(aj) * z)
    return out / (1.0 - z * np.conj(a[-1]))


def slice_value_table(sys: MTSystem, z) -> np.ndarray:
    """``(n, len(z))`` complex array of Phi_1..Phi_n at the points ``z``."""
    sys.slice()
    a = slice_poles(sys.poles, sys.poles.common_slice)[: len(sys.basis)]
    z = np.asarray(z, dtype=complex)
    rows = np.empty((len(a),) + z.shape, dtype=complex)
    prefix = np.ones(z.shape, dtype=complex)
    for k, ak in enumerate(a):
        rows[k] = math.sqrt(1.0 - abs(ak) ** 2) * prefix / (1.0 - z * np.conj(ak))
        prefix = prefix * (z - ak) / (1.0 - np.conj(ak) * z)
    return rows


def mt_eval_on_slice(sys: MTSystem, k: int, z_theta: float, radius: float = 1.0) -> Quaternion:
    """Phi_k at ``radius * e^{I z_theta}`` on the common slice I."""
    I = sys.slice()
    if not 0.0 <= radius <= 1.0:
        raise DomainError("radius must lie in [0, 1]")
    z = radius * np.exp(1j * z_theta)
    return Quaternion.from_array(from_slice_complex(slice_values(sys, k, z), I))


def classical_mt_eval(poles: PoleSequence, k: int, q) -> Quaternion:
    """Pointwise (non-regular) extension, products taken in the written order."""
    if not 1 <= k <= len(poles):
        raise IndexError(f"basis index {k} outside 1..{len(poles)}")
    q = Quaternion.coerce(q)
    out = Quaternion(_norm_factor(poles[k - 1]))
    for j in range(k - 1):
        out = multiply(out, classical_blaschke(poles[j], q))
    return multiply(out, inverse(1.0 - multiply(q, poles[k - 1].conj())))


# ---------------------------------------------------------------------------
# Gram matrices
# ---------------------------------------------------------------------------

def gram_matrix(sys: MTSystem, method: str = "coeff", nodes: int = DEFAULT_NODES) -> np.ndarray:
    """``G[m, n] = <Phi_(n+1), Phi_(m+1)>`` as an ``(n, n, 4)`` array.

    ``method="coeff"`` sums ``conj(b_k) a_k`` over the truncated series;
    ``method="quadrature"`` applies the uniform trapezoid rule on the boundary
    circle of the common slice with closed-form (untruncated) basis values.
    """
    n = len(sys.basis)
    G = np.zeros((n, n, 4))
    if method == "coeff":
        for m in range(n):
            for k in range(n):
                G[m, k] = h2_inner_coeff(sys.basis[k], sys.basis[m]).as_array()
        return G
    if method == "quadrature":
        I = sys.slice()
        if nodes < 2:
            raise DomainError("quadrature needs at least 2 nodes")
        z = np.exp(2j * np.pi * np.arange(nodes) / nodes)
        vals = slice_value_table(sys, z)
        # conj(Phi_m) Phi_k: elements of L_I commute, so complex arithmetic is exact here
        C = np.sum(np.conj(vals)[:, None, :] * vals[None, :, :], axis=-1) / nodes
        return from_slice_complex(C, I)
    raise DomainError(f"unknown Gram method {method!r}")


def identity_deviation(G: np.ndarray) -> float:
    """Max componentwise deviation of a quaternion Gram array from the identity."""
    n = G.shape[0]
    eye = np.zeros_like(G)
    eye[np.arange(n), np.arange(n), 0] = 1.0
    return float(np.max(np.abs(G - eye))) if n else 0.0
