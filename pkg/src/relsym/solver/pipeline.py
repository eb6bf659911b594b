"""Complete solves: boosted symmetric system, its Galilean analogue, and the
conservative reference in the lab frame.

Boosted solve, with boost velocity ``U`` along a grid axis and Lorentz factor
``gamma``:

1. A positivity certificate for ``Y0 = eps c(max rho)`` fixes ``Z = eps U``.
2. Initial data on ``t = 0`` are mapped to ``tau = t'' = 0``: positions by
   ``x'' = (I + (gamma - 1) Ut Ut^T) x``, velocities by the relativistic
   velocity transform, density unchanged.
3. The system ``B0 dW/dtau + sum_j Bj dW/dx''_j = 0`` is evolved on grid
   coordinates ``y = x'' + s tau``.  With ``grid_motion="lab"`` the grid moves
   with ``s = gamma^2 U``, which makes ``y = (I + (gamma - 1) Ut Ut^T) x`` and
   ``tau = t / gamma``: every grid point stays on one lab-frame point, so
   mapping data in and out needs no interpolation.  With
   ``grid_motion="static"`` (periodic grids only) ``s = 0`` and lab-frame
   output is interpolated at ``x'' = gamma (x - U t)``.
4. Output at physical times ``t`` is read at ``tau = t / gamma`` and
   transformed back with the inverse velocity map.

With ``eps = 0`` the same machinery reduces to the Galilean shift
``x# = x - U t``, ``u# = u - U``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..eos import EquationOfState, rho_of_w, sound_speed, w_of_rho
from ..errors import AdmissibilityError, DomainError
from ..kinematics import fields_to_symmetric, modified_speed, speed_of_modified
from ..lorentz import Boost, compose_velocity, speed_bounds
from ..symmetric_system import A_VALUES, PositivityCertificate, certify_positivity, evaluate_certificate
from .conservative import con2prim, conservative_rhs
from .diagnostics import support_radius
from .fields import FluidField, to_conservative
from .grid import Grid, interpolate
from .symmetric import VACUUM_W, symmetric_rhs
from .timestep import DEFAULT_CFL, check_cfl, ssprk3_step, stable_dt

__all__ = [
    "Snapshot",
    "Trajectory",
    "TameRunReport",
    "Solution",
    "solve_boosted",
    "solve_nonrelativistic",
    "solve_lab",
]

log = logging.getLogger(__name__)

GRID_MOTIONS = ("lab", "static")
MIN_Y0 = 0.01
_MAX_STEPS = 2_000_000


@dataclass(frozen=True)
class Snapshot:
    """Lab-frame fields at time ``t``."""

    t: float
    rho: np.ndarray
    u: np.ndarray


@dataclass
class Trajectory:
    grid: Grid
    snapshots: list = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.snapshots])

    def at(self, t: float) -> Snapshot:
        k = int(np.argmin(np.abs(self.times - t)))
        return self.snapshots[k]

    def fluid(self, k: int = -1) -> FluidField:
        s = self.snapshots[k]
        return FluidField(self.grid, s.rho, s.u)


@dataclass
class TameRunReport:
    """Diagnostics collected during a run.

    ``support_radius_series`` holds ``(t, radius)`` pairs at output times;
    ``w_min`` is the smallest ``w`` seen after any step; ``udir_norm_drift`` is
    the largest ``| |udir| - 1 |`` found before renormalization.
    """

    support_radius_series: list = field(default_factory=list)
    w_min: float = math.inf
    udir_norm_drift: float = 0.0
    min_time_matrix_eigenvalue: float = math.inf
    steps: int = 0
    kappa: float = math.nan
    certificate_margin: float = math.nan
    frame: str = ""
    grid_motion: str = ""
    U: tuple = ()
    warnings: list = field(default_factory=list)

    series: list = field(default_factory=list)

    SERIES_COLUMNS = ("t", "support_radius", "w_min", "udir_norm_drift",
                      "min_time_matrix_eigenvalue", "steps")

    def log_output(self, t: float, radius: float) -> None:
        """Record the support radius and the running diagnostics at an output time."""
        self.support_radius_series.append((float(t), float(radius)))
        self.series.append((float(t), float(radius), self.w_min, self.udir_norm_drift,
                            self.min_time_matrix_eigenvalue, self.steps))

    def drift_rate(self, T: float) -> float:
        return self.udir_norm_drift / T if T > 0 else 0.0

    def warn(self, msg: str) -> None:
        if msg not in self.warnings:
            self.warnings.append(msg)
            log.warning(msg)


@dataclass
class Solution:
    trajectory: Trajectory
    report: TameRunReport
    boost: Boost | None = None
    certificate: PositivityCertificate | None = None


def _output_times(T: float, output_times) -> np.ndarray:
    if not (T >= 0 and math.isfinite(T)):
        raise DomainError(f"final time must be finite and non-negative, got {T}")
    if output_times is None:
        ts = np.array([0.0, T])
    else:
        ts = np.asarray(sorted(set(float(t) for t in output_times) | {0.0}), dtype=float)
        if np.any(ts < 0) or np.any(ts > T * (1 + 1e-12)):
            raise DomainError("output times must lie in [0, T]")
    return np.unique(np.append(ts, T))


def _boost_axis(b: Boost, grid: Grid) -> int:
    if b.n != grid.n:
        raise DomainError("boost dimension differs from grid dimension")
    if b.speed == 0:
        return 0
    axis = int(np.argmax(np.abs(b.U)))
    if np.any(np.abs(np.delete(b.U, axis)) > 1e-14 * b.speed):
        raise DomainError("the boost velocity must be parallel to a grid axis")
    return axis


def _certify(eos: EquationOfState, initial: FluidField, boost: Boost | None):
    """Choose or validate the boost; return (boost, certificate)."""
    n = initial.grid.n
    eps = eos.eps
    rho_top = float(np.max(initial.rho))
    Y0 = max(eps * sound_speed(eos, rho_top), MIN_Y0)
    r0 = eps * float(np.max(initial.speed))
    if boost is None:
        cert = certify_positivity(Y0, n)
        if r0 > cert.r_star:
            raise AdmissibilityError(
                f"eps*max|u| = {r0:.6g} exceeds the certified bound sqrt(kappa) = {cert.r_star:.6g}"
            )
        return Boost(cert.Z / eps, eps), cert
    if boost.eps != eps:
        raise DomainError("boost eps differs from the equation of state")
    r1 = eps * boost.speed
    if not (r1 > r0):
        raise AdmissibilityError("boost speed must exceed every fluid speed")
    # prefer the widest speed window, as in the automatic search
    ratios = [a for a in sorted(A_VALUES, reverse=True) if r1 / a >= r0]
    if r0 > 0 and not ratios:
        ratios = [r1 / r0]
    for a in ratios:
        cert = evaluate_certificate(Y0, a, r1 / a, n, direction=boost.direction)
        if cert.valid:
            return boost, cert
    raise AdmissibilityError("the requested boost does not certify positivity of the time matrix")


def _to_lab(eos: EquationOfState, inv: Boost, W: np.ndarray):
    w = np.clip(0.5 * (W[0] - W[1]), 0.0, eos.w_max)
    v = np.maximum(0.5 * (W[0] + W[1]), 0.0)
    rho = rho_of_w(eos, w)
    uprime = speed_of_modified(eos.eps, v) * W[2:]
    return rho, compose_velocity(inv, uprime)


def _evolve_symmetric(eos: EquationOfState, initial: FluidField, boost: Boost, T: float,
                      output_times, grid_motion: str, cfl: float, dt: float | None,
                      report: TameRunReport, bounds: tuple | None) -> Trajectory:
    grid = initial.grid
    if grid_motion not in GRID_MOTIONS:
        raise DomainError(f"grid_motion must be one of {GRID_MOTIONS}")
    if grid_motion == "static" and not grid.periodic:
        raise DomainError("a static boosted grid needs periodic boundaries")
    axis = _boost_axis(boost, grid)
    g = boost.gamma
    ygrid = grid.scaled(axis, g)
    U = boost.U
    shift = g * g * U if grid_motion == "lab" else np.zeros(grid.n)
    inv = boost.inverse()
    report.grid_motion = grid_motion
    report.U = tuple(float(x) for x in U)

    # data on tau = 0 sit exactly on the stretched grid
    uprime = compose_velocity(boost, initial.u)
    zp, zm, ud = fields_to_symmetric(eos, initial.rho, uprime)
    W = np.concatenate([zp[None], zm[None], ud])
    report.w_min = min(report.w_min, float(np.min(0.5 * (W[0] - W[1]))))

    ts = _output_times(T, output_times)
    traj = Trajectory(grid)
    x_lab = grid.coordinates()

    def record(t: float, W: np.ndarray) -> None:
        if grid_motion == "lab":
            rho, u = _to_lab(eos, inv, W)
        else:
            y = x_lab.copy()
            y[axis] = g * (x_lab[axis] - U[axis] * t)
            wv = np.clip(0.5 * (W[0] - W[1]), 0.0, eos.w_max)
            v = np.maximum(0.5 * (W[0] + W[1]), 0.0)
            up = speed_of_modified(eos.eps, v) * W[2:]
            vals = interpolate(ygrid, np.concatenate([wv[None], up]), y)
            rho = rho_of_w(eos, np.clip(vals[0], 0.0, eos.w_max))
            u = compose_velocity(inv, vals[1:])
        traj.snapshots.append(Snapshot(float(t), rho, u))
        report.log_output(t, support_radius(grid, w_of_rho(eos, rho)))

    def rhs(Wc: np.ndarray) -> np.ndarray:
        res = symmetric_rhs(eos, ygrid, Wc, U, shift)
        report.min_time_matrix_eigenvalue = min(report.min_time_matrix_eigenvalue, res.min_eig_M0)
        return res.dWdt

    tau = 0.0
    record(0.0, W)
    dtau_fixed = None if dt is None else dt / g
    for t_out in ts[1:]:
        tau_out = t_out / g
        while tau < tau_out * (1 - 1e-14):
            res = symmetric_rhs(eos, ygrid, W, U, shift)
            if dtau_fixed is None:
                # res.rate already carries the 1/h factors
                dtau = min(stable_dt(1.0, res.rate, cfl), tau_out - tau)
            else:
                dtau = min(dtau_fixed, tau_out - tau)
                check_cfl(dtau, 1.0, res.rate, cfl)
            W = ssprk3_step(rhs, W, dtau)
            tau = tau + dtau if tau_out - tau > dtau * (1 + 1e-12) else tau_out
            report.steps += 1
            if report.steps > _MAX_STEPS:
                raise DomainError("step limit exceeded")
            norm = np.sqrt(np.sum(W[2:] ** 2, axis=0))
            report.udir_norm_drift = max(report.udir_norm_drift, float(np.max(np.abs(norm - 1.0))))
            W[2:] /= norm
            wmin = float(np.min(0.5 * (W[0] - W[1])))
            report.w_min = min(report.w_min, wmin)
            if bounds is not None:
                fluid = 0.5 * (W[0] - W[1]) >= VACUUM_W
                if np.any(fluid):
                    speed = eos.eps * speed_of_modified(eos.eps, np.maximum(0.5 * (W[0] + W[1]), 0.0))
                    lo, hi = bounds
                    if np.any(speed[fluid] < lo - 1e-8) or np.any(speed[fluid] > hi + 1e-8):
                        report.warn("eps|u'| left the certified interval [delta1, delta2]")
        record(t_out, W)
    return traj


def solve_boosted(eos: EquationOfState, initial: FluidField, T: float, output_times=None,
                  grid_motion: str = "lab", boost: Boost | None = None, cfl: float = DEFAULT_CFL,
                  dt: float | None = None) -> Solution:
    """Relativistic solve through a certified Lorentz boost.

    Parameters
    ----------
    eos : equation of state with ``eps > 0``
    initial : lab-frame data at ``t = 0``
    T : final lab time
    output_times : lab times to record (0 and T are always included)
    grid_motion : ``"lab"`` (default) or ``"static"``, see the module docstring
    boost : optional explicit boost; it must certify positivity for the data
    dt : optional fixed lab-time step; otherwise ``cfl`` sets an adaptive step

    Returns
    -------
    Solution with a lab-frame :class:`Trajectory` and a :class:`TameRunReport`.
    """
    if eos.eps <= 0:
        raise DomainError("solve_boosted needs eps > 0; use solve_nonrelativistic for eps = 0")
    initial.check_admissible(eos)
    boost, cert = _certify(eos, initial, boost)
    report = TameRunReport(frame="boosted", kappa=cert.kappa)
    bounds = speed_bounds(cert.r_star, cert.r1)
    traj = _evolve_symmetric(eos, initial, boost, T, output_times, grid_motion, cfl, dt, report, bounds)
    report.certificate_margin = cert.margin
    if report.min_time_matrix_eigenvalue < cert.margin:
        report.warn("time-matrix eigenvalue fell below the certificate margin")
    return Solution(traj, report, boost, cert)


def solve_nonrelativistic(eos: EquationOfState, initial: FluidField, T: float, shift,
                          output_times=None, grid_motion: str = "lab", cfl: float = DEFAULT_CFL,
                          dt: float | None = None) -> Solution:
    """Galilean-shifted solve for ``eps = 0`` with ``u# = u - U``, ``x# = x - U t``.

    ``|U|`` must be at least twice the largest initial speed.
    """
    if eos.eps != 0:
        raise DomainError("solve_nonrelativistic needs eps = 0")
    initial.check_admissible(eos)
    U = np.asarray(shift, dtype=float).reshape(initial.grid.n)
    if not np.linalg.norm(U) >= 2.0 * float(np.max(initial.speed)) or not np.any(U):
        raise AdmissibilityError("the shift velocity must satisfy |U| >= 2 max|u| and U != 0")
    boost = Boost(U, 0.0)
    report = TameRunReport(frame="galilean")
    traj = _evolve_symmetric(eos, initial, boost, T, output_times, grid_motion, cfl, dt, report, None)
    return Solution(traj, report, boost, None)


def _vacuum_floor(Uc: np.ndarray) -> np.ndarray:
    vac = Uc[0] <= 1e-14
    if np.any(vac):
        Uc = Uc.copy()
        Uc[:, vac] = 0.0
    return Uc


def solve_lab(eos: EquationOfState, initial: FluidField, T: float, output_times=None,
              cfl: float = DEFAULT_CFL, dt: float | None = None) -> Solution:
    """Reference solve of the conservative equations in the lab frame."""
    initial.check_admissible(eos)
    grid = initial.grid
    Uc = to_conservative(eos, initial).as_array()
    ts = _output_times(T, output_times)
    report = TameRunReport(frame="lab", grid_motion="lab")
    traj = Trajectory(grid)

    def record(t, Uc):
        rho, u = con2prim(eos, Uc[0], Uc[1:])
        traj.snapshots.append(Snapshot(float(t), rho, u))
        w = w_of_rho(eos, np.minimum(rho, eos.rho_max))
        report.w_min = min(report.w_min, float(np.min(w)))
        report.log_output(t, support_radius(grid, w))

    def rhs(Uc):
        return conservative_rhs(eos, grid, Uc)[0]

    t = 0.0
    record(0.0, Uc)
    for t_out in ts[1:]:
        while t < t_out * (1 - 1e-14):
            _, speed = conservative_rhs(eos, grid, Uc)
            if dt is None:
                step = min(stable_dt(grid.h, speed, cfl), t_out - t)
            else:
                step = min(dt, t_out - t)
                check_cfl(step, grid.h, speed, cfl)
            Uc = ssprk3_step(rhs, Uc, step, post=_vacuum_floor)
            t = t + step if t_out - t > step * (1 + 1e-12) else t_out
            report.steps += 1
        record(t_out, Uc)
    return Solution(traj, report)
