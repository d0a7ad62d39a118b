"""Tests of the circular/hyperbolic factorization of unit biquaternions."""

import math

import numpy as np
import pytest

from biquat_kge.algebra import (Biquaternion, Quaternion, factorize,
                                factorize_right, random_biquaternion,
                                random_unit_biquaternion)
from biquat_kge.exceptions import NotUnitError


def _matrix(q: Biquaternion) -> np.ndarray:
    return q.matrix_rep()


def _circular_matrix(f) -> np.ndarray:
    return f.u.to_biquaternion().matrix_rep()


class TestPreconditions:
    def test_not_unit_raises(self, rng):
        q = random_biquaternion(rng) * 3.0
        with pytest.raises(NotUnitError):
            factorize(q)
        with pytest.raises(NotUnitError):
            factorize_right(q)

    def test_normalized_input_is_accepted(self, rng):
        q = random_unit_biquaternion(rng)
        factorize(q)

    def test_custom_tolerance(self, rng):
        q = random_unit_biquaternion(rng) * (1.0 + 1e-6)
        with pytest.raises(NotUnitError):
            factorize(q)
        factorize(q, tol=1e-4)


class TestDegenerateCases:
    def test_unit_quaternion_input(self, rng):
        """No imaginary part: the hyperbolic factor collapses to 1."""
        q4 = Quaternion(*rng.uniform(-1, 1, 4))
        q = (q4 / q4.norm()).to_biquaternion()
        result = factorize(q)
        assert result.degenerate
        assert result.phi == 0.0
        assert result.axis == (0.0, 0.0, 0.0)
        np.testing.assert_allclose(
            result.u.to_biquaternion().vector_rep(), q.vector_rep(),
            rtol=0, atol=1e-15)
        np.testing.assert_allclose(_matrix(result.h), np.eye(4), atol=1e-15)

    def test_scalar_real_part(self):
        """q_r = cosh(phi): the circular factor is the identity."""
        phi = 0.7
        q = Biquaternion(w=math.cosh(phi), x=1j * math.sinh(phi))
        result = factorize(q)
        assert result.degenerate
        assert result.u == Quaternion(1.0)
        assert result.theta == 0.0
        assert abs(result.phi - phi) < 1e-12
        recon = _matrix(result.h) @ _circular_matrix(result)
        np.testing.assert_allclose(recon, _matrix(q), atol=1e-12)

    def test_negative_unit_real_part(self):
        result = factorize(Biquaternion(w=-1))
        assert result.u == Quaternion(-1.0)
        assert abs(result.theta - math.pi) < 1e-15
        assert result.phi == 0.0


class TestUnitNormSplit:
    """Unit biquaternions sit on the hyperbola cosh^2 - sinh^2 = 1."""

    def test_norm_split_and_purity(self, rng):
        for _ in range(300):
            q = random_unit_biquaternion(rng)
            q_r, q_i = q.real_part, q.imag_part
            assert abs(q_r.norm() ** 2 - q_i.norm() ** 2 - 1.0) < 1e-10
            # scalar of conj(q_r) q_i via the direct expansion
            direct = (q_r.w * q_i.w + q_r.x * q_i.x
                      + q_r.y * q_i.y + q_r.z * q_i.z)
            assert abs(direct) < 1e-10
            assert abs((q_r.conjugate() * q_i).scalar_part()) < 1e-10
            assert abs((q_i * q_r.conjugate()).scalar_part()) < 1e-10


class TestFactorization:
    def test_reconstruction_both_sides(self, rng):
        for _ in range(300):
            q = random_unit_biquaternion(rng)
            target = _matrix(q)
            left = factorize(q)
            right = factorize_right(q)
            recon_left = _matrix(left.h) @ _circular_matrix(left)
            recon_right = _circular_matrix(right) @ _matrix(right.h)
            assert np.max(np.abs(recon_left - target)) < 1e-9
            assert np.max(np.abs(recon_right - target)) < 1e-9

    def test_factor_properties(self, rng):
        for _ in range(200):
            q = random_unit_biquaternion(rng)
            f = factorize(q)
            m_h, m_u = _matrix(f.h), _circular_matrix(f)
            assert abs(np.linalg.det(m_h) - 1.0) < 1e-9
            assert abs(np.linalg.det(m_u) - 1.0) < 1e-9
            assert np.max(np.abs(m_h @ m_h.T - np.eye(4))) < 1e-9
            assert np.max(np.abs(m_u @ m_u.T - np.eye(4))) < 1e-9

    def test_angles_and_axis(self, rng):
        for _ in range(200):
            q = random_unit_biquaternion(rng)
            f = factorize(q)
            assert 0.0 <= f.theta <= math.pi
            assert f.phi >= 0.0
            assert abs(f.u.norm() - 1.0) < 1e-12
            assert abs(math.hypot(*f.axis) - 1.0) < 1e-10
            assert not f.degenerate

    def test_angles_recover_norm_split(self, rng):
        """cosh(phi) = ||q_r|| and cos(theta) = w_r / ||q_r||."""
        for _ in range(100):
            q = random_unit_biquaternion(rng)
            f = factorize(q)
            q_r = q.real_part
            assert abs(math.cosh(f.phi) - q_r.norm()) < 1e-10
            assert abs(math.cos(f.theta) - q_r.w / q_r.norm()) < 1e-12

    def test_explicit_factor_matrices(self, rng):
        """The factors match the closed-form cosh/sinh and cos/sin matrices."""
        for _ in range(100):
            q = random_unit_biquaternion(rng)
            f = factorize(q)
            ch, sh = math.cosh(f.phi), math.sinh(f.phi)
            a, b, c = (v * sh * 1j for v in f.axis)
            expected_h = np.array([
                [ch, -a, -b, -c],
                [a, ch, c, -b],
                [b, -c, ch, a],
                [c, b, -a, ch],
            ])
            assert np.max(np.abs(_matrix(f.h) - expected_h)) < 1e-9

            q_r = q.real_part
            sin_scale = math.sin(f.theta) / q_r.vector_norm()
            xs, ys, zs = (v * sin_scale for v in (q_r.x, q_r.y, q_r.z))
            ct = math.cos(f.theta)
            expected_u = np.array([
                [ct, -xs, -ys, -zs],
                [xs, ct, zs, -ys],
                [ys, -zs, ct, xs],
                [zs, ys, -xs, ct],
            ])
            assert np.max(np.abs(_circular_matrix(f) - expected_u)) < 1e-9

    def test_right_axis_differs_but_angles_match(self, rng):
        q = random_unit_biquaternion(rng)
        left, right = factorize(q), factorize_right(q)
        assert left.theta == right.theta
        assert left.phi == right.phi
        assert abs(math.hypot(*right.axis) - 1.0) < 1e-10
