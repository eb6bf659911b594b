"""Acceptance gate: one test per criterion, each recording a pass/fail line
that is printed in the terminal summary."""

import time

import numpy as np
import pytest

from conftest import record_acceptance
from oracles import collinear_relative_speed, expanded_quad_B
from relsym.eos import EquationOfState
from relsym.kinematics import fields_from_symmetric, fields_to_symmetric
from relsym.lorentz import Boost, boost_coords, compose_velocity, phi, speed_bounds
from relsym.solver import (
    FluidField,
    Grid,
    formulation_residual,
    solve_boosted,
    solve_lab,
    solve_nonrelativistic,
    to_conservative,
)
from relsym.symmetric_system import (
    boosted_time_matrix,
    certify_positivity,
    evaluate_certificate,
    qstar_matrix,
    quad_form_Q,
    sample_ball,
    system_matrices,
    verify_certificate,
)


def test_criterion_1_speed_bounds():
    rng = np.random.default_rng(1)
    levels = np.linspace(0.1, 0.9, 5)
    start = time.perf_counter()
    violations = 0
    extreme = 0.0
    pairs = 0
    for r0 in levels:
        for r1 in levels:
            if not r0 < r1:
                continue
            pairs += 1
            Z = np.array([r1, 0.0, 0.0])
            X = sample_ball(rng, 3, r0, 100_000)
            d1, d2 = speed_bounds(r0, r1)
            p = np.linalg.norm(phi(X, Z), axis=0)
            violations += int(np.sum(p < d1) + np.sum(p > d2))
            ends = np.linalg.norm(phi(np.array([[r0, -r0], [0, 0], [0, 0]]), Z), axis=0)
            want = [collinear_relative_speed(r0, r1), collinear_relative_speed(-r0, r1)]
            extreme = max(extreme, abs(ends[0] - want[0]), abs(ends[1] - want[1]),
                          abs(d1 - want[0]), abs(d2 - want[1]))
    elapsed = time.perf_counter() - start
    ok = violations == 0 and extreme <= 1e-12 and elapsed < 10.0
    record_acceptance(1, "speed bounds on Phi", ok,
                      f"pairs={pairs} violations={violations} extreme_err={extreme:.1e} time={elapsed:.1f}s")
    assert ok


def test_criterion_2_certificate():
    start = time.perf_counter()
    lam = []
    consistent = True
    for Y0 in (0.1, 0.5, 0.9):
        cert = certify_positivity(Y0)
        rep = verify_certificate(cert, n_samples=10_000, seed=int(10 * Y0))
        lam.append(rep.min_b0_eigenvalue)
        consistent &= rep.surrogate_consistent and rep.passed and cert.D_star > 0
    # planted negative case: a surrogate with D* < 0 must fail to be positive definite
    q1, q2, q3, q4 = 1.0, 1.0, 0.1, 0.5
    d_planted = q3 - q4**2 / q1 - q4**2 / q2
    planted_neg = d_planted < 0 and np.linalg.eigvalsh(qstar_matrix(q1, q2, q3, q4))[0] < 0
    bad = evaluate_certificate(0.99, 4.0, 0.24, 3)
    planted_neg &= bad.D_star <= 0 and np.linalg.eigvalsh(bad.qstar_matrix())[0] <= 0 and not bad.valid
    elapsed = time.perf_counter() - start
    ok = min(lam) >= 1e-10 and consistent and planted_neg and elapsed < 30.0
    record_acceptance(2, "positivity certificate", ok,
                      f"min_eig_B0={min(lam):.3e} planted_negative={planted_neg} time={elapsed:.1f}s")
    assert ok


def test_criterion_3_three_routes():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10_000):
        eps = rng.uniform(0.1, 0.9)
        X = sample_ball(rng, 3, 0.8, 1)[:, 0]
        Z = sample_ball(rng, 3, 0.8, 1)[:, 0]
        Y = 0.95 * rng.random()
        xi = rng.uniform(-1, 1, 5)
        D = np.r_[1.0, 1.0, eps, eps, eps]
        # assembled matrices at the boosted-frame state
        P = phi(X, Z)
        pn = np.linalg.norm(P)
        B0 = boosted_time_matrix(system_matrices(Y / eps, pn / eps, P / pn, eps), Z / eps, eps)
        v_asm = (D * xi) @ B0 @ (D * xi)
        # term-by-term expansion with the frame velocity from velocity composition
        uprime = compose_velocity(Boost(Z / eps, eps), X / eps)
        v_exp = expanded_quad_B(Y / eps, uprime, Z / eps, eps, D * xi)
        v_q = quad_form_Q(xi, X, Y, Z)
        scale = max(1.0, abs(v_q))
        worst = max(worst, abs(v_asm - v_exp) / scale, abs(v_asm - v_q) / scale, abs(v_exp - v_q) / scale)
    ok = worst <= 1e-12
    record_acceptance(3, "quadratic form identities", ok, f"tuples=10000 worst_rel_gap={worst:.1e}")
    assert ok


def test_criterion_4_formulation_order():
    eos = EquationOfState(1.0, 2.0, 0.5)
    res = []
    for N in (64, 128, 256):
        g = Grid(((-1.0, 1.0),), (N,))
        x = g.coordinates()[0]
        f = FluidField(g, 0.5 + 0.2 * np.sin(np.pi * x), (0.3 + 0.1 * np.cos(np.pi * x))[None])
        sol = solve_lab(eos, f, 0.1)
        res.append(formulation_residual(eos, to_conservative(eos, sol.trajectory.fluid())))
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    ok = bool(np.all(orders >= 1.8))
    record_acceptance(4, "formulation equivalence", ok,
                      "orders=" + ",".join(f"{o:.3f}" for o in orders))
    assert ok


def test_criterion_5_lorentz_invariance():
    eos = EquationOfState(1.0, 2.0, 0.5)
    N, T = 512, 0.2
    g = Grid(((-1.0, 1.0),), (N,))
    x = g.coordinates()[0]
    f = FluidField(g, 0.2 + 0.1 * np.exp(-x**2 / 0.04), np.zeros((1, N)))
    start = time.perf_counter()
    ref = solve_lab(eos, f, T).trajectory.snapshots[-1]
    errs = {}
    for motion in ("lab", "static"):
        s = solve_boosted(eos, f, T, grid_motion=motion).trajectory.snapshots[-1]
        errs[motion] = max(np.max(np.abs(s.rho - ref.rho)), np.max(np.abs(s.u - ref.u)))
    elapsed = time.perf_counter() - start
    tol = 5 * g.h[0]
    ok = max(errs.values()) <= tol and elapsed < 60.0
    record_acceptance(5, "lab vs boosted solve", ok,
                      f"err_lab={errs['lab']:.1e} err_static={errs['static']:.1e} tol={tol:.1e} time={elapsed:.1f}s")
    assert ok


def test_criterion_6_nonrelativistic_limit():
    N, T = 256, 0.25
    g = Grid(((-1.0, 1.0),), (N,))
    x = g.coordinates()[0]
    rho = 0.5 + 0.2 * np.exp(-x**2 / 0.04)
    out = {}
    for eps in (0.0, 1e-3, 2e-3):
        eos = EquationOfState(1.0, 2.0, eps)
        f = FluidField(g, rho, np.zeros((1, N)))
        # the same unit shift and step for every eps isolates the eps dependence
        if eps == 0:
            sol = solve_nonrelativistic(eos, f, T, [1.0], dt=T / 200)
        else:
            sol = solve_boosted(eos, f, T, boost=Boost([1.0], eps), dt=T / 200)
        out[eps] = sol.trajectory.snapshots[-1].rho
    d1 = np.max(np.abs(out[1e-3] - out[0.0]))
    d2 = np.max(np.abs(out[2e-3] - out[0.0]))
    ratio = d2 / d1
    ok = 3.0 <= ratio <= 5.0
    record_acceptance(6, "nonrelativistic limit", ok, f"d(1e-3)={d1:.2e} d(2e-3)={d2:.2e} ratio={ratio:.3f}")
    assert ok


def test_criterion_7_vacuum():
    eos = EquationOfState(1.0, 2.0, 0.5)
    N = 128
    g = Grid(((-1.0, 1.0), (-1.0, 1.0)), (N, N), boundary="vacuum")
    x, y = g.coordinates()
    r2 = x**2 + y**2
    rho = 0.1 * np.clip(1 - r2 / 0.25, 0, None) ** 4
    sol = solve_boosted(eos, FluidField(g, rho, np.zeros((2, N, N))), 0.2, output_times=np.linspace(0, 0.2, 5))
    rep = sol.report
    radii = [r for _, r in rep.support_radius_series]
    h = float(np.max(g.h))
    ok = rep.w_min >= 0.0 and max(radii) <= radii[0] + h and rep.udir_norm_drift < 1e-6
    record_acceptance(7, "vacuum boundary", ok,
                      f"w_min={rep.w_min:.1e} max_radius-r0={max(radii) - radii[0]:.1e} h={h:.1e} "
                      f"udir_drift={rep.udir_norm_drift:.1e}")
    assert ok


def test_criterion_8_roundtrips():
    rng = np.random.default_rng(8)
    eos = EquationOfState(1.0, 2.0, 0.5)
    n = 3
    rho = eos.rho_max * rng.random(1000)
    u = sample_ball(rng, n, 0.99 / eos.eps, 1000)
    rho2, u2 = fields_from_symmetric(eos, *fields_to_symmetric(eos, rho, u))
    e_sym = max(np.max(np.abs(rho2 - rho)), np.max(np.abs(u2 - u)))
    b = Boost(sample_ball(rng, n, 0.99 / eos.eps, 1)[:, 0], eos.eps)
    t = rng.uniform(-1, 1, 1000)
    xs = rng.uniform(-1, 1, (n, 1000))
    t1, x1 = boost_coords(b, t, xs)
    t2, x2 = boost_coords(b.inverse(), t1, x1)
    e_boost = max(np.max(np.abs(t2 - t)), np.max(np.abs(x2 - xs)))
    ok = e_sym <= 1e-10 and e_boost <= 1e-10
    record_acceptance(8, "transform roundtrips", ok, f"sym_err={e_sym:.1e} boost_err={e_boost:.1e}")
    assert ok
