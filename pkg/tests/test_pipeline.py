import numpy as np
import pytest

from relsym.eos import EquationOfState, w_of_rho
from relsym.errors import AdmissibilityError, DomainError
from relsym.lorentz import Boost
from relsym.solver import (
    FluidField,
    Grid,
    solve_boosted,
    solve_lab,
    solve_nonrelativistic,
    support_radius,
    trace_characteristics,
)


def bump_1d(N=128, amp=0.1, L=1.0, boundary="periodic"):
    g = Grid(((-L, L),), (N,), boundary=boundary)
    x = g.coordinates()[0]
    return FluidField(g, 0.2 + amp * np.exp(-x**2 / 0.04), np.zeros((1, N)))


def compact_1d(N=200, amp=0.1):
    g = Grid(((-1, 1),), (N,), boundary="vacuum")
    x = g.coordinates()[0]
    rho = np.where(np.abs(x) < 0.5, amp * np.clip(1 - x**2 / 0.25, 0, None) ** 4, 0.0)
    return FluidField(g, rho, np.zeros((1, N)))


class TestBoosted:
    def test_constant_state_is_preserved(self, eos_rel):
        g = Grid(((0, 1), (0, 1)), (16, 16))
        f = FluidField(g, np.full(g.shape, 0.3), np.stack([np.full(g.shape, 0.2), np.zeros(g.shape)]))
        sol = solve_boosted(eos_rel, f, 0.1)
        last = sol.trajectory.snapshots[-1]
        assert np.max(np.abs(last.rho - 0.3)) < 1e-12
        assert np.max(np.abs(last.u - f.u)) < 1e-12
        assert sol.report.frame == "boosted" and sol.report.steps > 0

    def test_vacuum_stays_vacuum(self, eos_rel):
        g = Grid(((-1, 1),), (32,), boundary="vacuum")
        sol = solve_boosted(eos_rel, FluidField(g, np.zeros(32), np.zeros((1, 32))), 0.1)
        assert np.all(sol.trajectory.snapshots[-1].rho == 0.0)

    def test_output_times_and_lookup(self, eos_rel):
        sol = solve_boosted(eos_rel, bump_1d(64), 0.1, output_times=[0.05])
        np.testing.assert_allclose(sol.trajectory.times, [0.0, 0.05, 0.1])
        assert sol.trajectory.at(0.05).t == 0.05
        assert len(sol.report.series) == 3

    def test_initial_snapshot_is_exact(self, eos_rel):
        f = bump_1d(64)
        snap = solve_boosted(eos_rel, f, 0.0).trajectory.snapshots[0]
        np.testing.assert_allclose(snap.rho, f.rho, rtol=1e-13)
        assert np.max(np.abs(snap.u)) < 1e-13

    def test_grid_motions_agree(self, eos_rel):
        f = bump_1d(256)
        a = solve_boosted(eos_rel, f, 0.1, grid_motion="lab").trajectory.snapshots[-1]
        b = solve_boosted(eos_rel, f, 0.1, grid_motion="static").trajectory.snapshots[-1]
        h = f.grid.h[0]
        assert np.max(np.abs(a.rho - b.rho)) < h
        assert np.max(np.abs(a.u - b.u)) < h

    def test_matches_lab_reference(self, eos_rel):
        f = bump_1d(256)
        a = solve_boosted(eos_rel, f, 0.1).trajectory.snapshots[-1]
        b = solve_lab(eos_rel, f, 0.1).trajectory.snapshots[-1]
        assert np.max(np.abs(a.rho - b.rho)) < 5 * f.grid.h[0]

    def test_explicit_boost(self, eos_rel):
        sol = solve_boosted(eos_rel, bump_1d(64), 0.05, boost=Boost([1.0], 0.5))
        assert sol.boost.U[0] == 1.0 and sol.certificate.valid
        with pytest.raises(AdmissibilityError):
            solve_boosted(eos_rel, bump_1d(64), 0.05, boost=Boost([1.6], 0.5))

    def test_rejects(self, eos_rel, eos_newton):
        f = bump_1d(64)
        with pytest.raises(DomainError):
            solve_boosted(eos_newton, f, 0.1)
        with pytest.raises(DomainError):
            solve_boosted(eos_rel, f, 0.1, grid_motion="sideways")
        with pytest.raises(DomainError):
            solve_boosted(eos_rel, compact_1d(), 0.1, grid_motion="static")
        with pytest.raises(DomainError):
            solve_boosted(eos_rel, f, -1.0)
        with pytest.raises(DomainError):
            solve_boosted(eos_rel, f, 0.1, output_times=[0.5])
        g = f.grid
        fast = FluidField(g, f.rho, np.full((1, 64), 1.0))
        with pytest.raises(AdmissibilityError):
            solve_boosted(eos_rel, fast, 0.1, boost=Boost([0.5], 0.5))
        with pytest.raises(AdmissibilityError):
            solve_boosted(eos_rel, FluidField(g, f.rho, np.full((1, 64), 2.5)), 0.1)

    def test_udir_drift_in_two_dimensions(self, eos_rel):
        g = Grid(((-1, 1), (-1, 1)), (64, 64))
        x, y = g.coordinates()
        rho = 0.2 + 0.05 * np.exp(-(x**2 + y**2) / 0.1)
        u = np.stack([0.02 * np.sin(np.pi * y), 0.02 * np.sin(np.pi * x)])
        sol = solve_boosted(eos_rel, FluidField(g, rho, u), 0.2)
        assert 0.0 < sol.report.udir_norm_drift
        assert sol.report.drift_rate(0.2) < 1e-6
        assert sol.report.min_time_matrix_eigenvalue > 0


class TestNonrelativistic:
    def test_galilean_covariance(self, eos_newton):
        f = bump_1d(128, amp=0.2)
        a = solve_nonrelativistic(eos_newton, f, 0.1, [1.0]).trajectory.snapshots[-1]
        b = solve_nonrelativistic(eos_newton, f, 0.1, [-1.5]).trajectory.snapshots[-1]
        assert np.max(np.abs(a.rho - b.rho)) < f.grid.h[0]
        ref = solve_lab(eos_newton, f, 0.1).trajectory.snapshots[-1]
        assert np.max(np.abs(a.rho - ref.rho)) < 5 * f.grid.h[0]

    def test_shift_requirements(self, eos_newton, eos_rel):
        g = Grid(((0, 1),), (16,))
        f = FluidField(g, np.full(16, 0.2), np.full((1, 16), 0.5))
        with pytest.raises(AdmissibilityError):
            solve_nonrelativistic(eos_newton, f, 0.1, [0.9])
        with pytest.raises(DomainError):
            solve_nonrelativistic(eos_rel, f, 0.1, [1.0])


class TestVacuumBoundary:
    def test_support_and_positivity(self, eos_rel):
        f = compact_1d()
        sol = solve_boosted(eos_rel, f, 0.1)
        radii = [r for _, r in sol.report.support_radius_series]
        assert sol.report.w_min >= 0.0
        assert max(radii) <= radii[0] + f.grid.h[0]

    def test_support_radius(self):
        g = Grid(((-1, 1),), (20,))
        w = np.zeros(20)
        w[[5, 12]] = 1.0
        x = g.axis(0)
        assert support_radius(g, w) == pytest.approx(max(abs(x[5]), abs(x[12])))
        assert support_radius(g, np.zeros(20)) == 0.0


class TestCharacteristics:
    def test_constant_velocity_paths_are_straight(self, eos_rel):
        g = Grid(((0, 1),), (32,))
        f = FluidField(g, np.full(32, 0.2), np.full((1, 32), 0.3))
        sol = solve_boosted(eos_rel, f, 0.2, output_times=np.linspace(0, 0.2, 5))
        tr = trace_characteristics(eos_rel, sol.trajectory, [[0.25, 0.5]])
        np.testing.assert_allclose(tr.positions[-1], [[0.31, 0.56]], atol=1e-12)
        assert tr.within_envelope()

    def test_envelope_on_smooth_flow(self, eos_rel):
        sol = solve_boosted(eos_rel, bump_1d(128), 0.1, output_times=np.linspace(0, 0.1, 11))
        tr = trace_characteristics(eos_rel, sol.trajectory, [[-0.3, -0.1, 0.0, 0.2]])
        assert tr.within_envelope(slack=1e-6)

    def test_vacuum_seed_keeps_zero_w(self, eos_rel):
        sol = solve_boosted(eos_rel, compact_1d(), 0.1, output_times=[0.05])
        tr = trace_characteristics(eos_rel, sol.trajectory, [[0.8]])
        assert np.all(tr.w == 0.0)

    def test_seed_validation(self, eos_rel):
        sol = solve_boosted(eos_rel, bump_1d(64), 0.01)
        with pytest.raises(DomainError):
            trace_characteristics(eos_rel, sol.trajectory, [[3.0]])
