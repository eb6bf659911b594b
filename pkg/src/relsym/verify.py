"""Seeded property suites behind ``relsym verify``.

Each suite samples its inputs from a fixed-seed generator and returns one
:class:`PropertyResult` per property: the number of samples, the worst
margin (non-negative means the property held at every sample) and a pass flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import EquationOfState, check_growth_condition, rho_of_w, w_of_rho
from .errors import CertificateSearchError, DomainError
from .kinematics import fields_from_symmetric, fields_to_symmetric
from .lorentz import Boost, boost_coords, boost_coords_rapidity, compose_velocity, phi, speed_bounds
from .symmetric_system import (
    boosted_time_matrix,
    certify_positivity,
    q_matrix,
    sample_ball,
    system_matrices,
    verify_certificate,
)

__all__ = ["SUITES", "PropertyResult", "SuiteReport", "run_suite", "run_suites"]

ROUNDTRIP_TOL = 1e-10
INTERVAL_TOL = 1e-10
IDENTITY_TOL = 1e-12
GROWTH_SLOPE_TOL = 1e-3


@dataclass(frozen=True)
class PropertyResult:
    name: str
    samples: int
    worst_margin: float
    passed: bool

    def line(self, suite: str) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"{suite:<12} {self.name:<48} n={self.samples:<8d} worst_margin={self.worst_margin:+.3e}  {status}"


@dataclass
class SuiteReport:
    suite: str
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_text(self) -> str:
        return "\n".join(r.line(self.suite) for r in self.results) + "\n"


def _tol_result(name: str, samples: int, worst_error: float, tol: float) -> PropertyResult:
    margin = tol - worst_error
    return PropertyResult(name, samples, float(margin), bool(np.isfinite(margin) and margin >= 0))


def _eos_suite(rng: np.random.Generator, samples: int) -> list:
    out = []
    for eos in (EquationOfState(1.0, 2.0, 0.5), EquationOfState(0.7, 5.0 / 3.0, 0.3), EquationOfState(1.0, 1.4, 0.0)):
        tag = f"k={eos.k:g},gamma={eos.gamma:.3g},eps={eos.eps:g}"
        rho = eos.rho_max * 10.0 ** rng.uniform(-12, 0, samples)
        w = w_of_rho(eos, rho)
        back = rho_of_w(eos, w)
        err = float(np.max(np.abs(back - rho) / rho))
        out.append(_tol_result(f"rho_of_w(w_of_rho) [{tag}]", samples, err, ROUNDTRIP_TOL))
        srt = np.sort(rho)
        dw = np.diff(w_of_rho(eos, srt))
        out.append(PropertyResult(f"w increasing [{tag}]", samples, float(dw.min()), bool(np.all(dw >= 0))))
        g = check_growth_condition(eos, slope_tol=GROWTH_SLOPE_TOL)
        out.append(PropertyResult(f"c/w bounded at vacuum [{tag}]", g.samples,
                                  g.log_slope_near_vacuum + GROWTH_SLOPE_TOL, g.finite))
    return out


def _kinematics_suite(rng: np.random.Generator, samples: int) -> list:
    out = []
    for n in (1, 2, 3):
        eos = EquationOfState(1.0, 2.0, 0.5)
        rho = eos.rho_max * rng.random(samples)
        u = sample_ball(rng, n, 0.999 / eos.eps, samples)
        zp, zm, ud = fields_to_symmetric(eos, rho, u)
        rho2, u2 = fields_from_symmetric(eos, zp, zm, ud)
        err = max(float(np.max(np.abs(rho2 - rho) / np.maximum(rho, 1.0))),
                  float(np.max(np.abs(u2 - u) / np.maximum(np.abs(u), 1.0))))
        out.append(_tol_result(f"(rho,u) -> (z+,z-,udir) -> (rho,u) [n={n}]", samples, err, ROUNDTRIP_TOL))
        norm_err = float(np.max(np.abs(np.linalg.norm(ud, axis=0) - 1.0)))
        out.append(_tol_result(f"|udir| = 1 [n={n}]", samples, norm_err, IDENTITY_TOL))
        order = float(np.min(zp - zm))
        out.append(PropertyResult(f"z+ >= z- [n={n}]", samples, order, bool(order >= 0)))
    return out


def _lorentz_suite(rng: np.random.Generator, samples: int) -> list:
    out = []
    n = 3
    per = max(1, samples // 10)
    worst = np.inf
    extreme = 0.0
    for _ in range(10):
        r0, r1 = np.sort(rng.uniform(0.01, 0.99, 2))
        if r1 - r0 < 1e-3:
            continue
        Z = sample_ball(rng, n, r1, 4)[:, 0]  # the first samples lie on the sphere
        X = sample_ball(rng, n, r0, per)
        d1, d2 = speed_bounds(r0, r1)
        p = np.linalg.norm(phi(X, Z), axis=0)
        worst = min(worst, float(np.min(p - d1)), float(np.min(d2 - p)))
        zt = Z / r1
        ends = np.linalg.norm(phi(np.stack([r0 * zt, -r0 * zt], axis=1), Z), axis=0)
        extreme = max(extreme, abs(ends[0] - d1), abs(ends[1] - d2))
    out.append(PropertyResult("delta1 <= |Phi| <= delta2", samples, worst, bool(worst >= -INTERVAL_TOL)))
    out.append(_tol_result("bounds attained at X = +-r0 Z/|Z|", 20, extreme, IDENTITY_TOL))

    eps = 0.5
    U = sample_ball(rng, n, 0.99 / eps, 1)[:, 0]
    b = Boost(U, eps)
    t = rng.uniform(-1, 1, samples)
    x = rng.uniform(-1, 1, (n, samples))
    t1, x1 = boost_coords(b, t, x)
    t2, x2 = boost_coords(b.inverse(), t1, x1)
    err = float(max(np.max(np.abs(t2 - t)), np.max(np.abs(x2 - x))))
    out.append(_tol_result("inverse boost o boost = id", samples, err, ROUNDTRIP_TOL))
    t3, x3 = boost_coords_rapidity(b, t, x)
    err = float(max(np.max(np.abs(t3 - t1)), np.max(np.abs(x3 - x1))))
    out.append(_tol_result("rapidity form = velocity form", samples, err, ROUNDTRIP_TOL))
    u = sample_ball(rng, n, 0.99 / eps, samples)
    up = compose_velocity(b, u)
    err = float(np.max(np.abs(compose_velocity(b.inverse(), up) - u)))
    out.append(_tol_result("velocity composition roundtrip", samples, err, ROUNDTRIP_TOL))
    sub = float(np.max(eps * np.linalg.norm(up, axis=0)))
    out.append(PropertyResult("eps|u'| < 1", samples, 1.0 - sub, bool(sub < 1.0)))
    return out


def _matrices_suite(rng: np.random.Generator, samples: int) -> list:
    out = []
    n = 3
    eps = 0.5
    Z = np.array([0.3, 0.0, 0.0])
    X = sample_ball(rng, n, 0.6, samples)
    keep = np.linalg.norm(phi(X, Z), axis=0) > 1e-6
    X = X[:, keep]
    m = X.shape[1]
    Y = 0.9 * rng.random(m)
    P = phi(X, Z)
    pn = np.linalg.norm(P, axis=0)
    mats = system_matrices(Y / eps, pn / eps, P / pn, eps)
    asym = max(float(np.max(np.abs(mats.A0 - np.swapaxes(mats.A0, -1, -2)))),
               float(np.max(np.abs(mats.A - np.swapaxes(mats.A, -1, -2)))))
    out.append(_tol_result("A0, Aj symmetric", m, asym, IDENTITY_TOL))
    B0 = boosted_time_matrix(mats, Z / eps, eps)
    D = np.diag(np.r_[1.0, 1.0, np.full(n, eps)])
    lhs = D @ B0 @ D
    rhs = q_matrix(X, Y, Z)
    err = float(np.max(np.abs(lhs - rhs)))
    out.append(_tol_result("D B0 D = matrix of Q", m, err, IDENTITY_TOL))
    return out


def _certificate_suite(rng: np.random.Generator, samples: int) -> list:
    out = []
    for Y0 in (0.1, 0.5, 0.9):
        seed = int(rng.integers(2**31))
        try:
            cert = certify_positivity(Y0, 3)
        except CertificateSearchError:  # reported as a failed property
            out.append(PropertyResult(f"certificate found [Y0={Y0}]", 1, -np.inf, False))
            continue
        rep = verify_certificate(cert, n_samples=samples, seed=seed)
        out.append(PropertyResult(f"min eig B0 >= 1e-10 [Y0={Y0}]", samples,
                                  rep.min_b0_eigenvalue - 1e-10, rep.passed))
        out.append(PropertyResult(f"Q* pd <=> D* > 0 [Y0={Y0}]", 1, cert.margin,
                                  rep.surrogate_consistent))
    return out


SUITES = {
    "eos": _eos_suite,
    "kinematics": _kinematics_suite,
    "lorentz": _lorentz_suite,
    "matrices": _matrices_suite,
    "certificate": _certificate_suite,
}


def run_suite(name: str, samples: int = 1000, seed: int = 0) -> SuiteReport:
    if name not in SUITES:
        raise DomainError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    if samples < 1:
        raise DomainError("samples must be positive")
    rng = np.random.default_rng([seed, list(SUITES).index(name)])
    return SuiteReport(name, SUITES[name](rng, samples))


def run_suites(name: str, samples: int = 1000, seed: int = 0) -> list:
    """Run one suite, or every suite when ``name == "all"``."""
    names = list(SUITES) if name == "all" else [name]
    return [run_suite(s, samples, seed) for s in names]
