import math

import numpy as np
import pytest

from _util import qdist, random_series_array, random_unit
from quatmt import (
    DomainError,
    PoleSequence,
    Quaternion,
    RegularSeries,
    SliceBoundaryGrid,
    build_mt,
    convergence_table,
    dirichlet_kernel,
    interpolation_residuals,
    mt_coefficients,
    project,
)
from quatmt.projection import dirichlet_kernel_forms, expansion, off_slice_interpolation
from quatmt.quat_core import UNIT_I, UNIT_J, multiply
from quatmt.series import h2_norm

N = 256


def random_slice_poles(rng, n, rmax=0.8, I=None):
    I = random_unit(rng) if I is None else I
    return PoleSequence.on_slice(rng.uniform(0, rmax, n), rng.uniform(0, 2 * math.pi, n), I)


def on_slice(zc, I):
    return Quaternion(zc.real, *(zc.imag * I.vector()))


def decaying_series(rng, degree=16):
    return RegularSeries(random_series_array(rng, degree, 0.8))


class TestCoefficients:
    def test_basis_element(self, rng):
        sys = build_mt(random_slice_poles(rng, 6), N=N)
        for m in range(1, 7):
            for method in ("coeff", "slice"):
                coeffs = mt_coefficients(sys[m], sys, method=method)
                for k, c in enumerate(coeffs, start=1):
                    assert qdist(c, Quaternion(1.0 if k == m else 0.0)) < 1e-9

    def test_monomial_case(self):
        sys = build_mt(PoleSequence.constant(0, 4, UNIT_I), N=8)
        coeffs = mt_coefficients(RegularSeries([0, 1]), sys)
        assert coeffs == [Quaternion(0), Quaternion(1), Quaternion(0), Quaternion(0)]

    def test_methods_agree(self, rng):
        sys = build_mt(random_slice_poles(rng, 6), N=N)
        f = decaying_series(rng)
        a = mt_coefficients(f, sys, method="coeff")
        b = mt_coefficients(f, sys, method="slice")
        assert max(qdist(x, y) for x, y in zip(a, b)) < 1e-10

    def test_grid_path(self, rng):
        poles = random_slice_poles(rng, 5)
        sys = build_mt(poles, N=N)
        f = decaying_series(rng)
        grid = SliceBoundaryGrid.from_series(f, poles.common_slice, 1024)
        a = mt_coefficients(f, sys)
        b = mt_coefficients(grid, sys)
        assert max(qdist(x, y) for x, y in zip(a, b)) < 1e-10

    def test_coefficients_in_slice_have_no_j_part(self, rng):
        I = random_unit(rng)
        poles = random_slice_poles(rng, 4, I=I)
        sys = build_mt(poles, N=N)
        f = RegularSeries([on_slice(complex(*rng.normal(size=2)) * 0.7**n, I) for n in range(12)])
        for c in mt_coefficients(f, sys, method="slice"):
            v = c.imag
            assert np.linalg.norm(v - (v @ I.vector()) * I.vector()) < 1e-12

    def test_slice_mismatch(self, rng):
        sys = build_mt(random_slice_poles(rng, 3, I=UNIT_I), N=32)
        grid = SliceBoundaryGrid(UNIT_J, np.zeros((16, 4)))
        with pytest.raises(DomainError):
            mt_coefficients(grid, sys)

    def test_too_many(self, rng):
        sys = build_mt(random_slice_poles(rng, 3), N=32)
        with pytest.raises(DomainError):
            mt_coefficients(RegularSeries([1]), sys, n=4)

    def test_unknown_method(self, rng):
        sys = build_mt(random_slice_poles(rng, 3), N=32)
        with pytest.raises(DomainError):
            mt_coefficients(RegularSeries([1]), sys, method="simpson")


class TestProject:
    def test_in_span(self, rng):
        sys = build_mt(random_slice_poles(rng, 5), N=N)
        c = [Quaternion(*rng.normal(size=4)) for _ in range(5)]
        f = expansion(sys, c)
        res = project(f, sys)
        assert res.residual_norm < 1e-9
        assert max(qdist(x, y) for x, y in zip(res.coefficients, c)) < 1e-9

    def test_coefficient_on_the_right(self, rng):
        sys = build_mt(random_slice_poles(rng, 2, I=UNIT_I), N=N)
        c = Quaternion(0, 0, 1)
        f = expansion(sys, [Quaternion(0), c])
        z = on_slice(0.3 + 0.2j, UNIT_I)
        from quatmt.series import evaluate

        assert qdist(evaluate(f, z), multiply(evaluate(sys[2], z), c)) < 1e-14

    def test_next_basis_element(self, rng):
        sys = build_mt(random_slice_poles(rng, 6), N=N)
        res = project(sys[6], sys, n=5)
        assert abs(res.residual_norm - 1) < 1e-8

    def test_zero_terms(self, rng):
        sys = build_mt(random_slice_poles(rng, 3), N=N)
        f = decaying_series(rng)
        res = project(f, sys, n=0)
        assert res.coefficients == ()
        assert h2_norm(res.approximant) == 0
        assert res.residual_norm == pytest.approx(h2_norm(f), abs=1e-15)

    def test_pythagoras(self, rng):
        for _ in range(5):
            sys = build_mt(random_slice_poles(rng, 8), N=N)
            f = decaying_series(rng)
            res = project(f, sys)
            total = res.residual_norm**2 + sum(c.norm() ** 2 for c in res.coefficients)
            assert abs(total - h2_norm(f) ** 2) < 1e-8

    def test_idempotent(self, rng):
        sys = build_mt(random_slice_poles(rng, 6), N=N)
        res = project(decaying_series(rng), sys)
        again = project(res.approximant, sys)
        assert max(qdist(x, y) for x, y in zip(res.coefficients, again.coefficients)) < 1e-10

    def test_best_approximation(self, rng):
        sys = build_mt(random_slice_poles(rng, 4), N=N)
        f = decaying_series(rng)
        res = project(f, sys)
        for k in range(4):
            for comp in range(4):
                for sign in (1, -1):
                    c = [x.as_array().copy() for x in res.coefficients]
                    c[k][comp] += sign * 0.01
                    perturbed = expansion(sys, [Quaternion(*x) for x in c])
                    assert h2_norm(f - perturbed) > res.residual_norm

    def test_grid_residual(self, rng):
        poles = random_slice_poles(rng, 6)
        sys = build_mt(poles, N=N)
        f = decaying_series(rng)
        grid = SliceBoundaryGrid.from_series(f, poles.common_slice, 1024)
        assert project(grid, sys).residual_norm == pytest.approx(project(f, sys).residual_norm, abs=1e-10)


class TestDirichletKernel:
    def test_zero_poles(self, rng):
        I = random_unit(rng)
        sys = build_mt(PoleSequence.constant(0, 5, I), N=16)
        z, w = on_slice(0.3 + 0.4j, I), on_slice(-0.5 + 0.1j, I)
        expected = on_slice(1 - (0.3 + 0.4j) ** 5 * np.conj(-0.5 + 0.1j) ** 5, I)
        total, closed = dirichlet_kernel_forms(sys, z, w)
        assert qdist(closed, expected) < 1e-15
        assert qdist(total, expected) < 1e-15

    def test_at_pole(self, rng):
        poles = random_slice_poles(rng, 4)
        sys = build_mt(poles, N=16)
        z = on_slice(0.2 - 0.3j, poles.common_slice)
        for a in poles.params:
            assert qdist(dirichlet_kernel(sys, z, a), Quaternion(1)) < 1e-15

    def test_empty(self, rng):
        sys = build_mt(random_slice_poles(rng, 2), N=16)
        I = sys.slice()
        total, closed = dirichlet_kernel_forms(sys, on_slice(0.1j, I), on_slice(0.2, I), n=0)
        assert total == closed == Quaternion(0)

    def test_identity(self, rng):
        for _ in range(20):
            n = int(rng.integers(1, 9))
            poles = random_slice_poles(rng, n)
            sys = build_mt(poles, N=16)
            I = poles.common_slice
            z = on_slice(rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * math.pi)), I)
            w = on_slice(rng.uniform(0, 1) * np.exp(1j * rng.uniform(0, 2 * math.pi)), I)
            total, closed = dirichlet_kernel_forms(sys, z, w)
            assert qdist(total, closed) < 1e-9

    def test_off_slice_rejected(self, rng):
        sys = build_mt(random_slice_poles(rng, 2, I=UNIT_I), N=16)
        with pytest.raises(DomainError):
            dirichlet_kernel(sys, Quaternion(0, 0, 0.5), Quaternion(0.1))


class TestInterpolation:
    def test_random(self, rng):
        for _ in range(5):
            sys = build_mt(random_slice_poles(rng, 8), N=N)
            assert max(interpolation_residuals(decaying_series(rng), sys)) < 1e-7

    def test_in_span(self, rng):
        sys = build_mt(random_slice_poles(rng, 5), N=N)
        f = expansion(sys, [Quaternion(*rng.normal(size=4)) for _ in range(5)])
        assert max(interpolation_residuals(f, sys)) < 1e-9

    def test_repeated_pole(self, rng):
        I = random_unit(rng)
        a = on_slice(0.6 * np.exp(1j * rng.uniform(0, 2 * math.pi)), I)
        sys = build_mt(PoleSequence.constant(a, 6, I), N=N)
        assert max(interpolation_residuals(decaying_series(rng), sys)) < 1e-7

    def test_grid_target(self, rng):
        poles = random_slice_poles(rng, 5)
        sys = build_mt(poles, N=N)
        grid = SliceBoundaryGrid.from_series(decaying_series(rng), poles.common_slice, 1024)
        assert max(interpolation_residuals(grid, sys)) < 1e-7

    def test_off_slice_experiment_runs(self, rng):
        sys = build_mt(random_slice_poles(rng, 4), N=N)
        errs = off_slice_interpolation(decaying_series(rng), sys, samples=3)
        assert len(errs) == 12 and all(np.isfinite(errs))


class TestConvergence:
    def test_finite_representation(self, rng):
        poles = random_slice_poles(rng, 8)
        sys = build_mt(poles, 3, N)
        f = expansion(sys, [Quaternion(*rng.normal(size=4)) for _ in range(3)])
        table = convergence_table(f, poles, 8, N)
        assert [n for n, _ in table] == list(range(1, 9))
        assert table[2][1] < 1e-9

    def test_non_increasing(self, rng):
        for _ in range(3):
            poles = random_slice_poles(rng, 10)
            table = convergence_table(decaying_series(rng), poles, 10, N)
            res = [r for _, r in table]
            assert all(b <= a + 1e-14 for a, b in zip(res, res[1:]))

    def test_matches_project(self, rng):
        poles = random_slice_poles(rng, 5)
        f = decaying_series(rng)
        table = convergence_table(f, poles, 5, N)
        sys = build_mt(poles, N=N)
        for n, r in table:
            assert r == pytest.approx(project(f, sys, n=n).residual_norm, abs=1e-13)

    def test_needs_enough_poles(self, rng):
        with pytest.raises(DomainError):
            convergence_table(RegularSeries([1]), random_slice_poles(rng, 2), 3)
