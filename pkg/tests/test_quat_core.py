import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from quatmt.quat_core import (
    UNIT_I,
    UNIT_J,
    UNIT_K,
    DomainError,
    Quaternion,
    UnitImaginary,
    exp_slice,
    haar_integral,
    inverse,
    is_close,
    multiply,
    orthogonal_unit,
    qmul,
    rotate,
    slice_decompose,
    unit_from_spherical,
)

I, J, K = Quaternion(0, 1), Quaternion(0, 0, 1), Quaternion(0, 0, 0, 1)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)
angles = st.floats(-10, 10, allow_nan=False)


def close(a, b, tol=1e-12):
    return (Quaternion.coerce(a) - Quaternion.coerce(b)).norm() <= tol


class TestMultiply:
    def test_hamilton_rules(self):
        assert multiply(I, J) == K
        assert multiply(J, I) == -K
        assert multiply(K, I) == J
        assert multiply(I, K) == -J
        for u in (I, J, K):
            assert multiply(u, u) == Quaternion(-1)

    def test_identity(self):
        q = Quaternion(0.3, -1.2, 4.0, 2.5)
        assert multiply(q, Quaternion(1)) == q

    def test_hand_expansion(self):
        # (1+i)(1+j) = 1 + j + i + ij = 1 + i + j + k
        assert multiply(Quaternion(1, 1), Quaternion(1, 0, 1)) == Quaternion(1, 1, 1, 1)

    def test_matches_array_layer(self, rng):
        a, b = rng.normal(size=(2, 4))
        assert np.allclose(multiply(Quaternion(*a), Quaternion(*b)).as_array(), qmul(a, b), atol=1e-15)

    @given(quats, quats)
    def test_norm_multiplicative(self, a, b):
        ab = multiply(a, b).norm()
        assert abs(ab - a.norm() * b.norm()) <= 1e-12 * max(1.0, ab)

    @given(quats, quats)
    def test_conjugate_reverses(self, a, b):
        lhs = multiply(a, b).conj()
        rhs = multiply(b.conj(), a.conj())
        assert (lhs - rhs).norm() <= 1e-14 * max(1.0, lhs.norm())

    @given(quats, quats, quats)
    def test_associative(self, a, b, c):
        lhs = multiply(multiply(a, b), c)
        assert (lhs - multiply(a, multiply(b, c))).norm() <= 1e-12 * max(1.0, lhs.norm())

    @given(quats)
    def test_conj_times_q_is_norm_squared(self, q):
        p = multiply(q.conj(), q)
        assert close(p, Quaternion(q.norm() ** 2), 1e-12 * max(1.0, q.norm() ** 2))


class TestInverse:
    def test_real(self):
        assert inverse(Quaternion(2)) == Quaternion(0.5)

    def test_unit_imaginary(self):
        assert inverse(I) == -I

    def test_derived(self):
        q = Quaternion(1, 1, 1, 1)
        assert close(inverse(q), Quaternion(0.25, -0.25, -0.25, -0.25), 1e-15)
        assert close(multiply(q, inverse(q)), Quaternion(1), 1e-15)

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            inverse(Quaternion())

    @given(quats)
    def test_right_inverse(self, q):
        if q.norm() < 1e-6:
            return
        assert close(multiply(q, inverse(q)), Quaternion(1), 1e-14)


class TestExpSlice:
    def test_zero_angle(self):
        assert exp_slice(0.0, UnitImaginary(0.3, 0.2, -0.9)) == Quaternion(1)

    def test_quarter_turn(self):
        assert close(exp_slice(math.pi / 2, UNIT_I), I, 1e-16)

    def test_derived(self):
        d = UnitImaginary(1, 1, 1)
        s = math.sqrt(3) / 2 / math.sqrt(3)
        assert close(exp_slice(math.pi / 3, d), Quaternion(0.5, s, s, s), 1e-15)

    @given(angles, angles, st.floats(0, math.pi), st.floats(0, 2 * math.pi))
    def test_same_slice_additive(self, t, p, t2, t3):
        d = unit_from_spherical(t2, t3)
        lhs = multiply(exp_slice(t, d), exp_slice(p, d))
        assert close(lhs, exp_slice(t + p, d))
        assert abs(exp_slice(t, d).norm() - 1.0) < 1e-15


class TestUnitImaginary:
    def test_spherical_axes(self):
        assert unit_from_spherical(0, 0) == UNIT_I
        assert close(unit_from_spherical(math.pi / 2, 0), J, 1e-16)
        assert close(unit_from_spherical(math.pi / 2, math.pi / 2), K, 1e-16)

    @given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
    def test_squares_to_minus_one(self, t2, t3):
        u = unit_from_spherical(t2, t3).as_quaternion()
        assert close(multiply(u, u), Quaternion(-1), 1e-14)

    def test_renormalized(self):
        u = UnitImaginary(3, 0, 4)
        assert (u.x, u.y, u.z) == pytest.approx((0.6, 0, 0.8), abs=1e-16)

    def test_zero_direction_rejected(self):
        with pytest.raises(DomainError):
            UnitImaginary(0, 0, 0)


class TestSliceDecompose:
    def test_on_i(self):
        assert slice_decompose(Quaternion(3, 4), UNIT_K) == (3.0, 4.0, UNIT_I)

    def test_real_uses_fallback(self):
        assert slice_decompose(Quaternion(5), UNIT_J) == (5.0, 0.0, UNIT_J)

    def test_derived(self):
        x, y, d = slice_decompose(Quaternion(1, 1, 1), UNIT_K)
        assert x == 1.0 and y == pytest.approx(math.sqrt(2), abs=1e-15)
        assert (d.x, d.y, d.z) == pytest.approx((1 / math.sqrt(2), 1 / math.sqrt(2), 0), abs=1e-15)

    @given(quats)
    def test_round_trip(self, q):
        sc = slice_decompose(q, UNIT_I)
        assert sc.y >= 0
        assert close(sc.to_quaternion(), q, 1e-14 * max(1.0, q.norm()))


class TestOrthogonalUnit:
    def test_rule(self):
        assert orthogonal_unit(UNIT_I) == UNIT_J
        assert orthogonal_unit(UNIT_J) == UNIT_I
        out = orthogonal_unit(UnitImaginary(1, 1, 0))
        assert (out.x, out.y, out.z) == pytest.approx((1 / math.sqrt(2), -1 / math.sqrt(2), 0), abs=1e-15)

    @given(st.floats(0, math.pi), st.floats(0, 2 * math.pi))
    def test_orthonormal(self, t2, t3):
        d = unit_from_spherical(t2, t3)
        e = orthogonal_unit(d)
        assert abs(d.dot(e)) < 1e-15
        assert abs(np.linalg.norm(e.vector()) - 1) < 1e-15


class TestRotate:
    def test_half_turn_about_k(self):
        assert close(rotate(exp_slice(math.pi / 2, UNIT_K), I), -I)

    def test_quarter_turn_about_k(self):
        assert close(rotate(exp_slice(math.pi / 4, UNIT_K), I), J)

    def test_identity(self):
        v = Quaternion(0, 0.2, -0.4, 1.1)
        assert rotate(Quaternion(1), v) == v

    def test_non_unit_rejected(self):
        with pytest.raises(DomainError):
            rotate(Quaternion(2), I)

    @given(quats, st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
    def test_preserves_norm_and_purity(self, q, x, y, z):
        if q.norm() < 1e-3:
            return
        u = q / q.norm()
        v = Quaternion(0, x, y, z)
        out = rotate(u, v)
        assert abs(out.norm() - v.norm()) < 1e-12 * max(1.0, v.norm())
        assert abs(out.w) < 1e-12 * max(1.0, v.norm())


class TestHaar:
    def test_normalization(self):
        assert haar_integral(lambda q: 1.0, (16, 16, 16)) == pytest.approx(1.0, abs=1e-12)

    def test_real_part_squared(self):
        # oracle: w = cos t1 depends on t1 alone, so integrate t1 on a much finer grid
        n = 200000
        t = (np.arange(n) + 0.5) * math.pi / n
        oracle = np.sum(np.cos(t) ** 2 * np.sin(t) ** 2) / np.sum(np.sin(t) ** 2)
        assert oracle == pytest.approx(0.25, abs=1e-12)
        assert haar_integral(lambda p: p[:, 0] ** 2, (32, 16, 16), vectorized=True) == pytest.approx(oracle, abs=1e-12)

    def test_odd_part_vanishes(self):
        assert abs(haar_integral(lambda q: q.w, (16, 16, 16))) < 1e-14
        assert abs(haar_integral(lambda p: p[:, 2], (16, 16, 16), vectorized=True)) < 1e-14

    def test_rotation_invariance_of_fourth_moments(self):
        # every coordinate has the same fourth moment 1/8 on the 3-sphere
        vals = [haar_integral(lambda p, c=c: p[:, c] ** 4, (64, 256, 64), vectorized=True) for c in range(4)]
        assert vals == pytest.approx([0.125] * 4, abs=1e-5)

    def test_grid_guard(self):
        with pytest.raises(DomainError):
            haar_integral(lambda q: 1.0, (1, 4, 4))


def test_is_close_relative_for_large_values():
    assert is_close(Quaternion(1e6), Quaternion(1e6 + 1e-7))
    assert not is_close(Quaternion(0.0), Quaternion(1e-11))


def test_nonfinite_rejected():
    with pytest.raises(DomainError):
        Quaternion(float("nan"))
