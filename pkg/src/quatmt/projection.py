"""Orthogonal projection onto span(Phi_1, ..., Phi_n) and its slice kernel.

``P_n f = sum_k Phi_k <f, Phi_k>`` with each inner product multiplying its
basis function from the right.  A target ``f`` is either a
:class:`RegularSeries` or boundary samples on the common slice.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .blaschke import classical_blaschke
from .hardy import SliceBoundaryGrid, boundary_norm, cauchy_slice_eval
from .mt_system import (
    DEFAULT_NODES,
    MTSystem,
    PoleSequence,
    build_mt,
    slice_value_table,
)
from .quat_core import DomainError, Quaternion, multiply, orthogonal_unit, qabs, qmul
from .series import (
    RegularSeries,
    combine_split,
    eval_points,
    from_slice_complex,
    h2_inner_coeff,
    h2_norm,
    in_slice,
    max_degree,
    restrict_to_slice,
    split_values,
    to_slice_complex,
)

Target = Union[RegularSeries, SliceBoundaryGrid]


@dataclass(frozen=True)
class ProjectionResult:
    coefficients: tuple
    approximant: RegularSeries
    residual_norm: float


def _boundary_z(M: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(M) / M)


def _check_grid(f: SliceBoundaryGrid, sys: MTSystem):
    I = sys.slice()
    if np.linalg.norm(f.direction.vector() - I.vector()) > 1e-12:
        raise DomainError("boundary samples are not on the common slice of the poles")


def _split_coefficients(F: np.ndarray, G: np.ndarray, sys: MTSystem, n: int) -> np.ndarray:
    """Quadrature of ``conj(Phi_k) F`` and ``conj(Phi_k) G`` recombined as ``cF + cG J``."""
    I = sys.slice()
    J = orthogonal_unit(I)
    M = F.shape[0]
    phis = slice_value_table(sys.truncated(n), _boundary_z(M)) if n else np.zeros((0, M), complex)
    cF = np.sum(np.conj(phis) * F[None, :], axis=-1) / M
    cG = np.sum(np.conj(phis) * G[None, :], axis=-1) / M
    return combine_split(cF, cG, I, J)


def mt_coefficients(
    f: Target,
    sys: MTSystem,
    method: str = "coeff",
    nodes: int = DEFAULT_NODES,
    n: Optional[int] = None,
) -> list[Quaternion]:
    """``<f, Phi_k>`` for ``k = 1..n``.

    For a series ``method="coeff"`` uses the coefficient sum and
    ``method="slice"`` splits ``f`` on the common slice as ``F + GJ`` and
    integrates both parts on the boundary circle.  Boundary samples always
    take the slice route.
    """
    n = len(sys.basis) if n is None else n
    if n > len(sys.basis):
        raise DomainError(f"system has only {len(sys.basis)} basis functions")
    if isinstance(f, SliceBoundaryGrid):
        _check_grid(f, sys)
        I = sys.slice()
        F, G = split_values(f.values, I, orthogonal_unit(I))
        return [Quaternion.from_array(c) for c in _split_coefficients(F, G, sys, n)]
    if method == "coeff":
        return [h2_inner_coeff(f, sys.basis[k]) for k in range(n)]
    if method == "slice":
        I = sys.slice()
        J = orthogonal_unit(I)
        Fs, Gs = restrict_to_slice(f, I, J)
        z = _boundary_z(nodes)
        coeffs = _split_coefficients(Fs.eval_complex(z), Gs.eval_complex(z), sys, n)
        return [Quaternion.from_array(c) for c in coeffs]
    raise DomainError(f"unknown coefficient method {method!r}")


def expansion(sys: MTSystem, coefficients, degree: Optional[int] = None) -> RegularSeries:
    """Series of ``sum_k Phi_k c_k``."""
    degree = sys.truncation_degree if degree is None else degree
    acc = np.zeros((degree + 1, 4))
    for phi, c in zip(sys.basis, coefficients):
        acc += qmul(phi.padded(degree), Quaternion.coerce(c).as_array())
    return RegularSeries(acc)


def project(
    f: Target,
    sys: MTSystem,
    n: Optional[int] = None,
    method: str = "coeff",
    nodes: int = DEFAULT_NODES,
) -> ProjectionResult:
    n = len(sys.basis) if n is None else n
    coeffs = mt_coefficients(f, sys, method=method, nodes=nodes, n=n)
    approx = expansion(sys.truncated(n), coeffs)
    if isinstance(f, SliceBoundaryGrid):
        M = f.size
        I = sys.slice()
        if n:
            phis = slice_value_table(sys.truncated(n), _boundary_z(M))
            vals = sum(
                qmul(from_slice_complex(phis[k], I), coeffs[k].as_array()) for k in range(n)
            )
        else:
            vals = np.zeros((M, 4))
        residual = boundary_norm(SliceBoundaryGrid(I, f.values - vals))
    else:
        residual = h2_norm(f - approx)
    return ProjectionResult(tuple(coeffs), approx, residual)


# ---------------------------------------------------------------------------
# slice kernel and interpolation
# ---------------------------------------------------------------------------

def _slice_complex(q, sys: MTSystem) -> complex:
    I = sys.slice()
    q = Quaternion.coerce(q)
    if not in_slice(q, I):
        raise DomainError("point is not on the common slice")
    return complex(to_slice_complex(q.as_array(), I))


def dirichlet_kernel_forms(sys: MTSystem, z, w, n: Optional[int] = None) -> tuple[Quaternion, Quaternion]:
    """(sum form, closed form) of the Darboux-Christoffel kernel on the common slice.

    Sum form: ``sum_l Phi_l(z) (1 - z conj(w)) conj(Phi_l(w))``.
    Closed form: ``1 - prod_l B_(a_l)(z) prod_l conj(B_(a_(n-l+1))(w))``.
    """
    n = len(sys.basis) if n is None else n
    I = sys.slice()
    zq, wq = Quaternion.coerce(z), Quaternion.coerce(w)
    zc, wc = _slice_complex(zq, sys), _slice_complex(wq, sys)
    if n == 0:
        return Quaternion(), Quaternion()
    table = slice_value_table(sys.truncated(n), np.array([zc, wc]))
    to_q = lambda c: Quaternion.from_array(from_slice_complex(c, I))
    factor = 1.0 - multiply(zq, wq.conj())
    total = Quaternion()
    for l in range(n):
        total = total + multiply(multiply(to_q(table[l, 0]), factor), to_q(table[l, 1]).conj())
    poles = sys.poles.params[:n]
    bz = Quaternion(1.0)
    for a in poles:
        bz = multiply(bz, classical_blaschke(a, zq))
    bw = Quaternion(1.0)
    for l in range(1, n + 1):
        bw = multiply(bw, classical_blaschke(poles[n - l], wq).conj())
    return total, 1.0 - multiply(bz, bw)


def dirichlet_kernel(sys: MTSystem, z, w, n: Optional[int] = None) -> Quaternion:
    return dirichlet_kernel_forms(sys, z, w, n)[1]


def _target_value(f: Target, q: Quaternion) -> Quaternion:
    if isinstance(f, SliceBoundaryGrid):
        return cauchy_slice_eval(f, q)
    return Quaternion.from_array(eval_points(f.coeffs, q.as_array()))


def interpolation_residuals(
    f: Target,
    sys: MTSystem,
    n: Optional[int] = None,
    method: str = "coeff",
    nodes: int = DEFAULT_NODES,
) -> list[float]:
    """``|P_n f(a_l) - f(a_l)|`` at each pole, projection evaluated in closed form on the slice."""
    n = len(sys.basis) if n is None else n
    I = sys.slice()
    coeffs = mt_coefficients(f, sys, method=method, nodes=nodes, n=n)
    out = []
    for a in sys.poles.params[:n]:
        zc = complex(to_slice_complex(a.as_array(), I))
        phis = slice_value_table(sys.truncated(n), np.array([zc]))[:, 0]
        val = sum(
            (qmul(from_slice_complex(phis[k], I), coeffs[k].as_array()) for k in range(n)),
            np.zeros(4),
        )
        out.append(float(qabs(val - _target_value(f, a).as_array())))
    return out


def off_slice_interpolation(f: RegularSeries, sys: MTSystem, samples: int = 8, seed: int = 0) -> list[float]:
    """Experiment: ``|P_n f(q) - f(q)|`` at points of the spheres through the poles, off the slice.

    Nothing here is guaranteed; the numbers are reported, not asserted.
    """
    rng = np.random.default_rng(seed)
    approx = project(f, sys).approximant
    out = []
    for a in sys.poles.params:
        v = a.imag
        r = float(np.linalg.norm(v))
        for _ in range(samples):
            u = rng.normal(size=3)
            u /= np.linalg.norm(u)
            q = np.concatenate([[a.w], r * u])
            out.append(float(qabs(eval_points(approx.coeffs, q) - eval_points(f.coeffs, q))))
    return out


def convergence_table(
    f: Target,
    poles: PoleSequence,
    n_max: int,
    N: Optional[int] = None,
    method: str = "coeff",
    nodes: int = DEFAULT_NODES,
) -> list[tuple[int, float]]:
    """Residual norms ``||f - P_n f||`` for ``n = 1..n_max``."""
    if len(poles) < n_max:
        raise DomainError(f"need {n_max} poles, got {len(poles)}")
    N = max_degree() if N is None else N
    sys = build_mt(poles, n_max, N)
    coeffs = mt_coefficients(f, sys, method=method, nodes=nodes)
    rows = []
    if isinstance(f, SliceBoundaryGrid):
        for n in range(1, n_max + 1):
            rows.append((n, project(f, sys, n=n).residual_norm))
        return rows
    approx = np.zeros((N + 1, 4))
    fc = f.padded(max(N, f.degree))
    for n in range(1, n_max + 1):
        approx = approx + qmul(sys.basis[n - 1].padded(N), coeffs[n - 1].as_array())
        diff = fc.copy()
        diff[: N + 1] -= approx
        rows.append((n, float(np.sqrt(np.sum(diff * diff)))))
    return rows
