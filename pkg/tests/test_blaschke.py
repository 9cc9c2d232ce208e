import math

import numpy as np
import pytest

from _util import ball_point, qdist, random_unit, slow_eval
from quatmt import (
    BlaschkeParam,
    DomainError,
    Quaternion,
    classical_blaschke,
    regular_blaschke_eval,
    regular_blaschke_series,
    star_product,
    t_a,
)
from quatmt.blaschke import cauchy_factor_series, linear_factor, regular_blaschke_points
from quatmt.quat_core import multiply
from quatmt.series import evaluate, in_slice


def unit_sphere_point(rng):
    v = rng.normal(size=4)
    return Quaternion(*(v / np.linalg.norm(v)))


def test_param_rejects_outside_ball():
    with pytest.raises(DomainError):
        BlaschkeParam(Quaternion(0.6, 0.8))
    with pytest.raises(DomainError):
        BlaschkeParam(Quaternion(1.2))
    assert BlaschkeParam(Quaternion(0.5)).a == Quaternion(0.5)


class TestClassical:
    def test_zero_parameter(self):
        q = Quaternion(0.1, 0.2, -0.3, 0.4)
        assert classical_blaschke(0, q) == q

    def test_zero_at_a(self):
        a = Quaternion(0.1, 0.5, 0, -0.2)
        assert classical_blaschke(a, a).norm() < 1e-16

    def test_real(self):
        assert classical_blaschke(0.5, 1.0) == Quaternion(1.0)

    def test_modulus(self, rng):
        for _ in range(50):
            a = ball_point(rng, 0.9)
            assert classical_blaschke(a, ball_point(rng, 0.99)).norm() < 1
            assert abs(classical_blaschke(a, unit_sphere_point(rng)).norm() - 1) < 1e-12


class TestTa:
    def test_real_case(self):
        assert t_a(0.3, 0.7) == Quaternion(0.7)

    def test_zero_parameter(self):
        q = Quaternion(0.1, 0.2, 0.3, 0.4)
        assert t_a(0, q) == q

    def test_hand_expansion(self):
        # 1 - j(0.5i) = 1 + 0.5k; conjugating j by it gives 0.8i + 0.6j
        out = t_a(Quaternion(0, 0.5), Quaternion(0, 0, 1))
        assert qdist(out, Quaternion(0, 0.8, 0.6)) < 1e-15

    def test_preserves_sphere(self, rng):
        for _ in range(50):
            a, q = ball_point(rng, 0.95), ball_point(rng, 1.0)
            t = t_a(a, q)
            assert abs(t.norm() - q.norm()) < 1e-12
            assert abs(t.w - q.w) < 1e-12


class TestSeries:
    def test_zero_parameter(self):
        s = regular_blaschke_series(0, 6)
        expected = np.zeros((7, 4))
        expected[1, 0] = 1
        assert np.array_equal(s.coeffs, expected)

    def test_real_parameter(self):
        s = regular_blaschke_series(0.5, 8)
        assert s.coeffs[:4, 0] == pytest.approx([-0.5, 0.75, 0.375, 0.1875], abs=1e-16)
        assert np.all(s.coeffs[:, 1:] == 0)

    def test_coefficient_pattern(self, rng):
        # constant term -a, then conj(a)^(n-1) - conj(a)^n a
        a = ball_point(rng, 0.9)
        s = regular_blaschke_series(a, 20)
        assert qdist(s[0], -a) < 1e-16
        ab = a.conj()
        power = Quaternion(1)
        for n in range(1, 21):
            expected = power - multiply(multiply(power, ab), a)
            assert qdist(s[n], expected) < 1e-15
            power = multiply(power, ab)

    def test_factors_commute(self, rng):
        for _ in range(10):
            a = ball_point(rng, 0.9)
            rec, lin = cauchy_factor_series(a, 64), linear_factor(a)
            lhs = star_product(rec, lin, degree=64)
            rhs = star_product(lin, rec, degree=64)
            assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-13

    def test_series_matches_closed_form(self, rng):
        for _ in range(20):
            a = ball_point(rng, 0.8)
            s = regular_blaschke_series(a, 128)
            q = ball_point(rng, 0.9)
            assert qdist(evaluate(s, q), regular_blaschke_eval(a, q)) < 1e-10


class TestClosedForm:
    def test_zero_parameter(self):
        q = Quaternion(0.3, 0, 0.2, 0.1)
        assert qdist(regular_blaschke_eval(0, q), q) < 1e-16

    def test_zero_at_a(self, rng):
        for _ in range(10):
            a = ball_point(rng, 0.95)
            assert regular_blaschke_eval(a, a).norm() < 1e-14
            a = ball_point(rng, 0.8)
            assert qdist(slow_eval(regular_blaschke_series(a, 200).coeffs, a), Quaternion()) < 1e-12

    def test_boundary_modulus(self, rng):
        a = Quaternion(0.3, 0.4)
        for _ in range(100):
            assert abs(regular_blaschke_eval(a, unit_sphere_point(rng)).norm() - 1) < 1e-12

    def test_interior_modulus(self, rng):
        for _ in range(100):
            a = ball_point(rng, 0.95)
            assert regular_blaschke_eval(a, ball_point(rng, 0.999)).norm() < 1

    def test_slice_preservation(self, rng):
        for _ in range(20):
            I = random_unit(rng)
            r, t = rng.uniform(0, 0.9), rng.uniform(0, 2 * math.pi)
            a = Quaternion(r * math.cos(t), *(r * math.sin(t) * I.vector()))
            s = rng.uniform(0, 2 * math.pi)
            z = Quaternion(math.cos(s), *(math.sin(s) * I.vector()))
            out = regular_blaschke_eval(a, z)
            assert in_slice(out, I)
            assert qdist(out, classical_blaschke(a, z)) < 1e-12

    def test_vectorized(self, rng):
        a = ball_point(rng, 0.9)
        pts = np.array([ball_point(rng, 1.0).as_array() for _ in range(30)])
        vec = regular_blaschke_points(a, pts)
        for p, v in zip(pts, vec):
            assert np.max(np.abs(v - regular_blaschke_eval(a, Quaternion(*p)).as_array())) < 1e-15
