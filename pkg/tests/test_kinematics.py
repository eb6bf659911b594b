import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relsym.eos import EquationOfState, w_of_rho
from relsym.errors import AdmissibilityError, DegenerateError, DomainError
from relsym.kinematics import (
    PhysicalState,
    SymmetricState,
    fields_from_symmetric,
    fields_to_symmetric,
    from_symmetric,
    modified_speed,
    projector,
    speed_of_modified,
    to_symmetric,
)

SQ8 = 2.0 * math.sqrt(2.0)


class TestModifiedSpeed:
    def test_values(self):
        assert modified_speed(0.5, 0.0) == 0.0
        # (1 / (2 eps)) ln((1 + eps s) / (1 - eps s)) with eps s = 1/2
        assert modified_speed(0.5, 1.0) == pytest.approx(math.log(3.0), rel=1e-15)
        assert modified_speed(0.0, 0.7) == 0.7

    def test_inverse_values(self):
        assert speed_of_modified(0.5, math.log(3.0)) == pytest.approx(1.0, rel=1e-15)
        assert speed_of_modified(0.3, 0.0) == 0.0

    def test_light_speed_rejected(self):
        with pytest.raises(AdmissibilityError):
            modified_speed(0.5, 2.0)

    @settings(max_examples=300, deadline=None)
    @given(st.one_of(st.just(0.0), st.floats(1e-6, 0.99)), st.floats(0.0, 0.999))
    def test_roundtrip(self, eps, frac):
        speed = frac / eps if eps > 0 else 10 * frac
        back = speed_of_modified(eps, modified_speed(eps, speed))
        assert abs(back - speed) <= 1e-12 * max(1.0, speed)


class TestProjector:
    def test_axis(self):
        np.testing.assert_array_equal(projector([1.0, 0.0]), [[0.0, 0.0], [0.0, 1.0]])

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-10, 10), min_size=3, max_size=3))
    def test_annihilates_u_and_is_idempotent(self, u):
        u = np.array(u)
        if np.linalg.norm(u) < 1e-6:
            return
        E = projector(u)
        assert np.max(np.abs(E @ u)) <= 1e-13 * np.linalg.norm(u)
        assert np.max(np.abs(E @ E - E)) <= 1e-14 * 10
        assert np.max(np.abs(E - E.T)) == 0.0

    def test_zero_velocity(self):
        with pytest.raises(DegenerateError):
            projector([0.0, 0.0])


class TestStateMaps:
    def test_vacuum_moving(self):
        sym = to_symmetric(EquationOfState(1, 2, 0.0), PhysicalState(0.0, [0.3, 0.0]))
        assert sym.z_plus == pytest.approx(0.3) and sym.z_minus == pytest.approx(0.3)
        np.testing.assert_array_equal(sym.udir, [1.0, 0.0])

    def test_unit_density(self):
        eos = EquationOfState(1, 2, 0.0)
        sym = to_symmetric(eos, PhysicalState(1.0, [0.5, 0.0]))
        assert sym.z_plus == pytest.approx(0.5 + SQ8, rel=1e-13)
        assert sym.z_minus == pytest.approx(0.5 - SQ8, rel=1e-13)
        back = from_symmetric(eos, sym)
        assert back.rho == pytest.approx(1.0, rel=1e-12)
        np.testing.assert_allclose(back.u, [0.5, 0.0], atol=1e-12)

    def test_full_vacuum(self, eos_rel):
        st_ = from_symmetric(eos_rel, SymmetricState(0.0, 0.0, [0.0, 1.0]))
        assert st_.rho == 0.0 and np.all(st_.u == 0.0)

    def test_static_fluid(self, eos_rel):
        st_ = from_symmetric(eos_rel, SymmetricState(1.0, -1.0, [1.0]))
        assert st_.u[0] == 0.0
        assert w_of_rho(eos_rel, st_.rho) == pytest.approx(1.0, rel=1e-12)

    def test_zero_velocity_needs_fallback(self, eos_rel):
        with pytest.raises(DegenerateError):
            to_symmetric(eos_rel, PhysicalState(0.2, [0.0, 0.0]))
        sym = to_symmetric(eos_rel, PhysicalState(0.2, [0.0, 0.0]), fallback=[0.0, 2.0])
        np.testing.assert_array_equal(sym.udir, [0.0, 1.0])

    def test_ordering_violations(self, eos_rel):
        with pytest.raises(DomainError):
            from_symmetric(eos_rel, SymmetricState(-1.0, 1.0, [1.0]))
        with pytest.raises(DomainError):
            from_symmetric(eos_rel, SymmetricState(-1.0, -2.0, [1.0]))
        with pytest.raises(DomainError):
            SymmetricState(1.0, 0.0, [1.0, 1.0])

