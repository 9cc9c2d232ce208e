"""Named invariant checks run by ``quatmt selftest``.

Each check takes a ``numpy.random.Generator`` and returns the measured
worst-case error; it passes when that error is below its tolerance.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import blaschke, hardy, mt_system, projection, quat_core, series
from .quat_core import Quaternion, UnitImaginary, qabs, qmul
from .series import RegularSeries, eval_points, from_slice_complex


@dataclass(frozen=True)
class Check:
    name: str
    tol: float
    func: Callable[[np.random.Generator], float]

    def run(self, rng: np.random.Generator) -> tuple[bool, float]:
        err = float(self.func(rng))
        ok = math.isfinite(err) and err < self.tol
        return ok, err


REGISTRY: list[Check] = []


def check(name: str, tol: float):
    def deco(func):
        REGISTRY.append(Check(name, tol, func))
        return func

    return deco


def _rand_q(rng, scale=1.0) -> np.ndarray:
    return rng.normal(size=4) * scale


def _rand_ball(rng, rmax=1.0) -> np.ndarray:
    v = rng.normal(size=4)
    return v / np.linalg.norm(v) * rng.uniform(0.0, rmax)


def _rand_sphere(rng) -> np.ndarray:
    v = rng.normal(size=4)
    return v / np.linalg.norm(v)


def _rand_unit(rng) -> UnitImaginary:
    return UnitImaginary.from_vector(rng.normal(size=3))


def _rand_series(rng, degree, decay=1.0) -> RegularSeries:
    c = rng.normal(size=(degree + 1, 4)) * (decay ** np.arange(degree + 1))[:, None]
    return RegularSeries(c)


def _slice_poles(rng, n, rmax, I) -> mt_system.PoleSequence:
    return mt_system.PoleSequence.on_slice(rng.uniform(0.0, rmax, n), rng.uniform(0.0, 2 * np.pi, n), I)


# --- quaternion core --------------------------------------------------------

@check("quat.norm_multiplicative", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(200):
        a, b = _rand_q(rng), _rand_q(rng)
        ab = qabs(qmul(a, b))
        worst = max(worst, abs(ab - qabs(a) * qabs(b)) / max(1.0, ab))
    return worst


@check("quat.conjugate_reverses_product", 1e-14)
def _(rng):
    worst = 0.0
    for _ in range(200):
        a, b = Quaternion(*_rand_q(rng)), Quaternion(*_rand_q(rng))
        worst = max(worst, ((a * b).conj() - b.conj() * a.conj()).norm() / max(1.0, (a * b).norm()))
    return worst


@check("quat.associative", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(200):
        a, b, c = (_rand_q(rng) for _ in range(3))
        lhs = qmul(qmul(a, b), c)
        worst = max(worst, qabs(lhs - qmul(a, qmul(b, c))) / max(1.0, qabs(lhs)))
    return worst


@check("quat.unit_imaginary_squares_to_minus_one", 1e-14)
def _(rng):
    worst = 0.0
    for _ in range(200):
        I = quat_core.unit_from_spherical(rng.uniform(0, np.pi), rng.uniform(0, 2 * np.pi))
        Iq = I.as_quaternion()
        worst = max(worst, (Iq * Iq + 1.0).norm())
    return worst


@check("quat.rotation_preserves_norm_and_purity", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(200):
        q = Quaternion(*_rand_sphere(rng))
        v = _rand_q(rng)
        v[0] = 0.0
        out = quat_core.rotate(q, Quaternion(*v))
        worst = max(worst, abs(out.norm() - qabs(v)), abs(out.w))
    return worst


@check("quat.exp_slice_additive", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(200):
        I = _rand_unit(rng)
        t, p = rng.uniform(-7, 7, 2)
        lhs = quat_core.exp_slice(t, I) * quat_core.exp_slice(p, I)
        worst = max(worst, (lhs - quat_core.exp_slice(t + p, I)).norm())
    return worst


@check("quat.haar_normalization", 1e-6)
def _(rng):
    return abs(quat_core.haar_integral(lambda p: np.ones(len(p)), (32, 32, 32), vectorized=True) - 1.0)


# --- series -----------------------------------------------------------------

@check("series.conjugate_of_star_product", 1e-13)
def _(rng):
    worst = 0.0
    for _ in range(20):
        f, g = _rand_series(rng, rng.integers(0, 17)), _rand_series(rng, rng.integers(0, 17))
        lhs = series.regular_conjugate(series.star_product(f, g))
        rhs = series.star_product(series.regular_conjugate(g), series.regular_conjugate(f))
        worst = max(worst, float(np.max(np.abs(lhs.coeffs - rhs.coeffs))))
    return worst


@check("series.symmetrization_commutes_and_is_real", 1e-13)
def _(rng):
    worst = 0.0
    for _ in range(20):
        f = _rand_series(rng, rng.integers(0, 17), decay=0.8)
        fc = series.regular_conjugate(f)
        a = series.star_product(f, fc).coeffs
        b = series.star_product(fc, f).coeffs
        worst = max(worst, float(np.max(np.abs(a - b))), float(np.max(np.abs(a[:, 1:]))))
    return worst


@check("series.reciprocal_identity", 1e-10)
def _(rng):
    worst = 0.0
    for _ in range(20):
        a = _rand_ball(rng, 0.9)
        f = blaschke.denominator(a)
        prod = series.star_product(f, series.regular_reciprocal(f, 128), degree=128)
        worst = max(worst, float(np.max(np.abs(prod.coeffs[1:]))), abs(prod.coeffs[0, 0] - 1.0))
    return worst


@check("series.real_evaluation_homomorphism", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(20):
        f, g = _rand_series(rng, 8, 0.7), _rand_series(rng, 8, 0.7)
        t = np.array([rng.uniform(-1, 1), 0, 0, 0])
        lhs = eval_points(series.star_product(f, g).coeffs, t)
        rhs = qmul(eval_points(f.coeffs, t), eval_points(g.coeffs, t))
        worst = max(worst, qabs(lhs - rhs) / max(1.0, qabs(rhs)))
    return worst


@check("series.slice_pointwise_product", 1e-11)
def _(rng):
    worst = 0.0
    for _ in range(20):
        I = _rand_unit(rng)
        f = RegularSeries(from_slice_complex(rng.normal(size=9) + 1j * rng.normal(size=9), I))
        g = RegularSeries(from_slice_complex(rng.normal(size=9) + 1j * rng.normal(size=9), I))
        z = from_slice_complex(rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi)), I)
        lhs = eval_points(series.star_product(f, g).coeffs, z)
        rhs = qmul(eval_points(f.coeffs, z), eval_points(g.coeffs, z))
        worst = max(worst, qabs(lhs - rhs) / max(1.0, qabs(rhs)))
    return worst


@check("series.parseval_consistency", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(20):
        f = _rand_series(rng, 32)
        ip = series.h2_inner_coeff(f, f)
        n2 = series.h2_norm(f) ** 2
        worst = max(worst, float(np.max(np.abs(ip.imag))) / n2, abs(ip.w - n2) / n2)
    return worst


@check("series.restrict_round_trip", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(20):
        I = _rand_unit(rng)
        J = quat_core.orthogonal_unit(I)
        f = _rand_series(rng, 12)
        F, G = series.restrict_to_slice(f, I, J)
        back = series.combine_split(F.coeffs, G.coeffs, I, J)
        worst = max(worst, float(np.max(np.abs(back - f.coeffs))))
    return worst


# --- blaschke ---------------------------------------------------------------

@check("blaschke.factor_commutation", 1e-13)
def _(rng):
    worst = 0.0
    for _ in range(20):
        a = _rand_ball(rng, 0.9)
        r = blaschke.cauchy_factor_series(a, 64)
        lin = blaschke.linear_factor(a)
        d = series.star_product(r, lin, degree=64).coeffs - series.star_product(lin, r, degree=64).coeffs
        worst = max(worst, float(np.max(np.abs(d))))
    return worst


@check("blaschke.series_matches_closed_form", 1e-10)
def _(rng):
    worst = 0.0
    for _ in range(10):
        a = _rand_ball(rng, 0.9)
        s = blaschke.regular_blaschke_series(a, 128)
        for _ in range(10):
            q = _rand_ball(rng, 0.9)
            worst = max(worst, qabs(eval_points(s.coeffs, q) - blaschke.regular_blaschke_points(a, q)))
    return worst


@check("blaschke.boundary_modulus", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(10):
        a = _rand_ball(rng, 0.95)
        pts = np.array([_rand_sphere(rng) for _ in range(100)])
        worst = max(worst, float(np.max(np.abs(qabs(blaschke.regular_blaschke_points(a, pts)) - 1.0))))
        inner = np.array([_rand_ball(rng, 0.999) for _ in range(100)])
        if np.any(qabs(blaschke.regular_blaschke_points(a, inner)) >= 1.0):
            return np.inf
    return worst


@check("blaschke.slice_preservation", 1e-12)
def _(rng):
    worst = 0.0
    for _ in range(20):
        I = _rand_unit(rng)
        a = from_slice_complex(rng.uniform(0, 0.9) * np.exp(1j * rng.uniform(0, 2 * np.pi)), I)
        z = from_slice_complex(rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi)), I)
        reg = blaschke.regular_blaschke_eval(a, z)
        cls = blaschke.classical_blaschke(a, z)
        perp = reg.imag - (reg.imag @ I.vector()) * I.vector()
        worst = max(worst, (reg - cls).norm(), float(np.linalg.norm(perp)))
    return worst


# --- M-T system ---------------------------------------------------------------

@check("mt.orthonormality_both_methods", 1e-8)
def _(rng):
    worst = 0.0
    for _ in range(3):
        I = _rand_unit(rng)
        sys = mt_system.build_mt(_slice_poles(rng, 8, 0.8, I), 8, 256)
        for method in ("coeff", "quadrature"):
            worst = max(worst, mt_system.identity_deviation(mt_system.gram_matrix(sys, method, 1024)))
    return worst


@check("mt.gram_method_agreement", 1e-9)
def _(rng):
    I = _rand_unit(rng)
    sys = mt_system.build_mt(_slice_poles(rng, 8, 0.8, I), 8, 256)
    return float(np.max(np.abs(mt_system.gram_matrix(sys, "coeff") - mt_system.gram_matrix(sys, "quadrature"))))


@check("mt.laguerre_equivalence", 1e-12)
def _(rng):
    I = _rand_unit(rng)
    a = Quaternion.from_array(from_slice_complex(0.6 * np.exp(1j * rng.uniform(0, 2 * np.pi)), I))
    sys = mt_system.build_mt(mt_system.PoleSequence.constant(a, 9, I), 9, 256)
    return max(
        float(np.max(np.abs(mt_system.laguerre_closed_form(a, n, 256).coeffs - sys[n + 1].coeffs)))
        for n in range(9)
    )


@check("mt.trigonometric_degeneration", 1e-15)
def _(rng):
    sys = mt_system.build_mt(mt_system.PoleSequence.constant(0.0, 8), 8, 32)
    return max(
        float(np.max(np.abs(sys[k].coeffs - RegularSeries.monomial(k - 1).padded(32)))) for k in range(1, 9)
    )


@check("mt.unit_norms", 1e-9)
def _(rng):
    I = _rand_unit(rng)
    sys = mt_system.build_mt(_slice_poles(rng, 8, 0.8, I), 8, 256)
    return max(abs(series.h2_norm(phi) - 1.0) for phi in sys.basis)


# --- hardy ------------------------------------------------------------------

@check("hardy.parseval_equivalence", 1e-10)
def _(rng):
    worst = 0.0
    I = _rand_unit(rng)
    for _ in range(10):
        f, g = _rand_series(rng, 16), _rand_series(rng, 16)
        quad = hardy.inner_product_quadrature(
            hardy.SliceBoundaryGrid.from_series(f, I, 64), hardy.SliceBoundaryGrid.from_series(g, I, 64)
        )
        worst = max(worst, (quad - series.h2_inner_coeff(f, g)).norm())
    return worst


@check("hardy.poisson_and_cauchy_on_slice", 1e-9)
def _(rng):
    worst = 0.0
    I = _rand_unit(rng)
    f = _rand_series(rng, 32)
    grid = hardy.SliceBoundaryGrid.from_series(f, I, 1024)
    for _ in range(10):
        r, t = rng.uniform(0, 0.9), rng.uniform(0, 2 * np.pi)
        z = Quaternion.from_array(from_slice_complex(r * np.exp(1j * t), I))
        ref = f(z)
        worst = max(worst, (hardy.poisson_eval(grid, r, t) - ref).norm(), (hardy.cauchy_slice_eval(grid, z) - ref).norm())
    return worst


@check("hardy.off_slice_reconstruction", 1e-8)
def _(rng):
    f = _rand_series(rng, 32)
    grid = hardy.SliceBoundaryGrid.from_series(f, quat_core.UNIT_I, 1024)
    worst = 0.0
    for _ in range(20):
        q = _rand_ball(rng, 0.8)
        worst = max(worst, qabs(hardy.regular_cauchy_eval(grid, q).as_array() - eval_points(f.coeffs, q)))
    return worst


@check("hardy.extension_of_restriction", 1e-11)
def _(rng):
    I = _rand_unit(rng)
    f = _rand_series(rng, 16, decay=0.8)
    worst = 0.0
    for _ in range(20):
        q = Quaternion(*_rand_ball(rng, 1.0))
        worst = max(worst, (hardy.extend_from_slice(f, I, q) - f(q)).norm())
    return worst


@check("hardy.cauchy_kernel_slice_reduction", 1e-13)
def _(rng):
    worst = 0.0
    for _ in range(50):
        I = _rand_unit(rng)
        sc, qc = complex(*rng.normal(size=2)), complex(*rng.uniform(-0.5, 0.5, 2))
        k = hardy.cauchy_kernel(from_slice_complex(sc, I), from_slice_complex(qc, I))
        worst = max(worst, qabs(k.as_array() - from_slice_complex(1.0 / (sc - qc), I)) / max(1.0, abs(1.0 / (sc - qc))))
    return worst


# --- projection -------------------------------------------------------------

@check("projection.interpolation", 1e-7)
def _(rng):
    worst = 0.0
    for _ in range(5):
        I = _rand_unit(rng)
        sys = mt_system.build_mt(_slice_poles(rng, int(rng.integers(1, 9)), 0.8, I), None, 256)
        f = _rand_series(rng, 16)
        worst = max(worst, max(projection.interpolation_residuals(f, sys)))
    return worst


@check("projection.darboux_christoffel", 1e-9)
def _(rng):
    I = _rand_unit(rng)
    sys = mt_system.build_mt(_slice_poles(rng, 8, 0.8, I), 8, 64)
    worst = 0.0
    for _ in range(50):
        z, w = (
            from_slice_complex(rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * np.pi)), I) for _ in range(2)
        )
        s, c = projection.dirichlet_kernel_forms(sys, z, w)
        worst = max(worst, (s - c).norm())
    return worst


@check("projection.pythagoras", 1e-8)
def _(rng):
    I = _rand_unit(rng)
    sys = mt_system.build_mt(_slice_poles(rng, 6, 0.8, I), 6, 256)
    f = _rand_series(rng, 24)
    res = projection.project(f, sys)
    return abs(series.h2_norm(f) ** 2 - sum(c.norm() ** 2 for c in res.coefficients) - res.residual_norm ** 2)


@check("projection.idempotence", 1e-10)
def _(rng):
    I = _rand_unit(rng)
    sys = mt_system.build_mt(_slice_poles(rng, 6, 0.8, I), 6, 256)
    first = projection.project(_rand_series(rng, 24), sys)
    second = projection.project(first.approximant, sys)
    return max((a - b).norm() for a, b in zip(first.coefficients, second.coefficients))


@check("projection.best_approximation", 0.5)
def _(rng):
    # returns 0 when every perturbation increases the residual, 1 otherwise
    I = _rand_unit(rng)
    sys = mt_system.build_mt(_slice_poles(rng, 4, 0.8, I), 4, 128)
    f = _rand_series(rng, 16)
    res = projection.project(f, sys)
    base = res.residual_norm
    for k in range(len(res.coefficients)):
        for comp in range(4):
            for sign in (1.0, -1.0):
                c = [x.as_array() for x in res.coefficients]
                c[k] = c[k].copy()
                c[k][comp] += sign * 0.01
                if series.h2_norm(f - projection.expansion(sys, c)) <= base:
                    return 1.0
    return 0.0


@check("projection.monotone_convergence", 1e-15)
def _(rng):
    I = _rand_unit(rng)
    poles = _slice_poles(rng, 12, 0.8, I)
    f = _rand_series(rng, 24)
    table = projection.convergence_table(f, poles, 12, N=128)
    # largest increase between consecutive residuals
    return max(0.0, max(b[1] - a[1] for a, b in zip(table, table[1:])))


def names() -> list[str]:
    return [c.name for c in REGISTRY]


def run_all(seed: int = 0) -> list[tuple[str, bool, float, float, str]]:
    out = []
    for c in REGISTRY:
        rng = np.random.default_rng([seed, zlib.crc32(c.name.encode())])
        try:
            ok, err = c.run(rng)
        except Exception as exc:  # a crash is a failed check, reported by name
            ok, err = False, float("nan")
            out.append((c.name, ok, err, c.tol, f"{type(exc).__name__}: {exc}"))
            continue
        out.append((c.name, ok, err, c.tol, ""))
    return out

