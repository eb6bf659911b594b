import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relsym.errors import AdmissibilityError, DomainError
from relsym.lorentz import (
    Boost,
    boost_coords,
    boost_coords_rapidity,
    compose_velocity,
    first_axis_rotation,
    phi,
    speed_bounds,
    transformed_speed_sq,
)
from relsym.symmetric_system import sample_ball


def four_velocity_oracle(U, eps, u):
    """u' from the 4x4 boost matrix acting on the 4-velocity (c = 1/eps)."""
    U = np.asarray(U, float)
    c = 1.0 / eps
    beta = U / c
    b2 = beta @ beta
    g = 1.0 / math.sqrt(1 - b2)
    L = np.eye(4)
    L[0, 0] = g
    L[0, 1:] = L[1:, 0] = -g * beta
    L[1:, 1:] += (g - 1) * np.outer(beta, beta) / b2
    gu = 1.0 / math.sqrt(1 - (u @ u) / c**2)
    p = L @ np.r_[gu * c, gu * u]
    return p[1:] / p[0] * c


def interval(eps, t, x):
    return -(t / eps) ** 2 + np.sum(x * x, axis=0)


class TestBoost:
    def test_derived_quantities(self):
        b = Boost([0.6, 0.8, 0.0], 0.5)
        assert b.speed == pytest.approx(1.0)
        assert b.gamma == pytest.approx(1 / math.sqrt(0.75))
        assert math.cosh(b.eps * b.V) == pytest.approx(b.gamma, rel=1e-14)
        assert math.tanh(b.eps * b.V) == pytest.approx(b.eps * b.speed, rel=1e-14)
        assert math.exp(b.eps * b.V) == pytest.approx(math.sqrt(1.5 / 0.5), rel=1e-14)

    def test_superluminal_rejected(self):
        with pytest.raises(AdmissibilityError):
            Boost([3.0], 0.5)
        with pytest.raises(DomainError):
            Boost([0.1], 1.0)

    def test_origin_fixed(self):
        t, x = boost_coords(Boost([0.3, 0.2], 0.7), 0.0, np.zeros(2))
        assert t == 0.0 and np.all(x == 0.0)

    def test_galilean_limit(self):
        t, x = boost_coords(Boost([2.0], 0.0), 1.5, np.array([1.0]))
        assert t == 1.5 and x[0] == pytest.approx(-2.0)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.05, 0.95), st.floats(-3, 3), st.lists(st.floats(-3, 3), min_size=3, max_size=3))
    def test_minkowski_interval_and_inverse(self, frac, t, x):
        eps = 0.4
        U = np.array([0.3, -0.5, 0.2])
        U = U / np.linalg.norm(U) * frac / eps
        b = Boost(U, eps)
        x = np.array(x)
        t1, x1 = boost_coords(b, t, x)
        scale = max(1.0, (t / eps) ** 2 + x @ x)
        assert abs(interval(eps, t1, x1) - interval(eps, t, x)) <= 1e-10 * scale
        t2, x2 = boost_coords(b.inverse(), t1, x1)
        assert abs(t2 - t) <= 1e-12 * max(1, abs(t), np.abs(x).max()) * 10
        assert np.max(np.abs(x2 - x)) <= 1e-12 * max(1, abs(t), np.abs(x).max()) * 10

    def test_rapidity_form_agrees(self, rng):
        for _ in range(20):
            eps = rng.uniform(0.05, 0.9)
            U = sample_ball(rng, 3, 0.95 / eps, 1)[:, 0]
            b = Boost(U, eps)
            t = rng.uniform(-2, 2, 50)
            x = rng.uniform(-2, 2, (3, 50))
            ta, xa = boost_coords(b, t, x)
            tb, xb = boost_coords_rapidity(b, t, x)
            assert np.max(np.abs(ta - tb)) <= 1e-12 * 10
            assert np.max(np.abs(xa - xb)) <= 1e-12 * 10 / eps

    def test_rapidities_add_along_one_axis(self, rng):
        eps, d = 0.5, np.array([0.0, 1.0, 0.0])
        b1, b2 = Boost.from_rapidity(0.7, d, eps), Boost.from_rapidity(1.1, d, eps)
        b12 = Boost.from_rapidity(1.8, d, eps)
        t = rng.uniform(-1, 1, 30)
        x = rng.uniform(-1, 1, (3, 30))
        ta, xa = boost_coords(b2, *boost_coords(b1, t, x))
        tb, xb = boost_coords(b12, t, x)
        assert np.max(np.abs(ta - tb)) < 1e-10 and np.max(np.abs(xa - xb)) < 1e-10


class TestVelocities:
    def test_static_and_comoving(self):
        b = Boost([0.4, 0.3], 0.8)
        np.testing.assert_allclose(compose_velocity(b, np.zeros(2)), -b.U, atol=1e-15)
        np.testing.assert_allclose(compose_velocity(b, b.U), 0.0, atol=1e-15)

    def test_against_four_velocity_oracle(self, rng):
        for _ in range(200):
            eps = rng.uniform(0.05, 0.95)
            U = sample_ball(rng, 3, 0.97 / eps, 1)[:, 0]
            u = sample_ball(rng, 3, 0.97 / eps, 1)[:, 0]
            got = compose_velocity(Boost(U, eps), u)
            want = four_velocity_oracle(U, eps, u)
            assert np.max(np.abs(got - want)) <= 1e-9 / eps
            assert eps * np.linalg.norm(got) < 1.0

    def test_light_speed_velocity_rejected(self):
        with pytest.raises(AdmissibilityError):
            compose_velocity(Boost([0.1], 0.5), np.array([2.0]))

    def test_closed_form_speed(self, rng):
        X = sample_ball(rng, 3, 0.99, 100_000)
        Z = sample_ball(rng, 3, 0.99, 1)[:, 0]
        got = transformed_speed_sq(X, Z)
        want = np.sum(phi(X, Z) ** 2, axis=0)
        assert np.max(np.abs(got - want)) <= 1e-12

    def test_closed_form_special_points(self):
        Z = np.array([0.3, 0.4, 0.0])
        assert transformed_speed_sq(Z[:, None], Z)[0] == pytest.approx(0.0, abs=1e-15)
        assert transformed_speed_sq(np.zeros((3, 1)), Z)[0] == pytest.approx(Z @ Z, rel=1e-14)

    def test_rotation(self, rng):
        for _ in range(20):
            Z = rng.standard_normal(3)
            R = first_axis_rotation(Z)
            np.testing.assert_allclose(R @ Z, [np.linalg.norm(Z), 0, 0], atol=1e-14)
            np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-14)


class TestSpeedBounds:
    def test_values(self):
        d1, d2 = speed_bounds(0.5, 0.8)
        assert d1 == pytest.approx(0.5, rel=1e-15)
        assert d2 == pytest.approx(1.3 / 1.4, rel=1e-15)

    def test_ordering_enforced(self):
        for r0, r1 in [(0.5, 0.5), (0.6, 0.5), (0.0, 0.5), (0.5, 1.0)]:
            with pytest.raises(DomainError):
                speed_bounds(r0, r1)

    def test_sharpness_trend(self):
        d1 = [speed_bounds(0.5, 0.5 + h)[0] for h in (0.1, 0.01, 0.001, 1e-4)]
        assert all(a > b for a, b in zip(d1, d1[1:])) and d1[-1] < 1e-3

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.01, 0.98), st.floats(0.01, 0.98), st.integers(1, 3))
    def test_bounds_hold(self, a, b, n):
        r0, r1 = sorted((a, b))
        if r1 - r0 < 1e-6:
            return
        rng = np.random.default_rng(int(1e6 * a))
        Z = sample_ball(rng, n, r1, 4)[:, 0]
        X = sample_ball(rng, n, r0, 2000)
        d1, d2 = speed_bounds(r0, r1)
        p = np.sqrt(transformed_speed_sq(X, Z))
        assert np.all(p >= d1 - 1e-12) and np.all(p <= d2 + 1e-12)
