"""Run diagnostics: support radius, characteristics, formulation consistency."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..eos import EquationOfState, check_growth_condition, sound_speed, w_of_rho
from ..errors import DomainError
from ..kinematics import fields_to_symmetric
from .conservative import con2prim, conservative_rhs
from .fields import ConservativeField
from .grid import Grid, interpolate
from .symmetric import VACUUM_W, symmetric_rhs

__all__ = [
    "support_radius",
    "CharacteristicTrace",
    "trace_characteristics",
    "primitive_time_derivative",
    "symmetric_time_derivative",
    "formulation_residual",
]


def support_radius(grid: Grid, w: np.ndarray, threshold: float = VACUUM_W) -> float:
    """Radius of the smallest origin-centred ball containing every cell with w > threshold."""
    inside = np.asarray(w) > threshold
    if not np.any(inside):
        return 0.0
    x = grid.coordinates()
    r = np.sqrt(np.sum(x * x, axis=0))
    return float(np.max(r[inside]))


@dataclass
class CharacteristicTrace:
    """Particle paths ``y(t)`` and ``w`` sampled along them.

    ``positions`` has shape ``(len(times), n, n_seeds)``; ``w`` has shape
    ``(len(times), n_seeds)``.  ``envelope_constant`` is ``C = C_R * G`` with
    ``C_R = sup c/w`` and ``G`` the largest value over the run of
    ``|eps^2 (1 - eps^2 |u|^2) c u.grad w + div u| / (1 - eps^4 |u|^2 c^2)``,
    so that ``|log(w(t) / w(0))| <= C t`` along every characteristic.
    """

    times: np.ndarray
    positions: np.ndarray
    w: np.ndarray
    envelope_constant: float
    growth_bound: float
    derivative_bound: float

    def log_ratio(self) -> np.ndarray:
        """log(w(t)/w(0)) per seed (NaN where w(0) = 0)."""
        w0 = self.w[0]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(self.w / w0)
        out[:, w0 <= 0] = np.nan
        return out

    def within_envelope(self, slack: float = 1e-9) -> bool:
        lr = self.log_ratio()
        ok = np.abs(lr) <= self.envelope_constant * self.times[:, None] + slack
        return bool(np.all(ok | np.isnan(lr)))


def _gradient(grid: Grid, f: np.ndarray) -> np.ndarray:
    out = []
    for j in range(grid.n):
        if grid.periodic:
            g = (np.roll(f, -1, axis=j) - np.roll(f, 1, axis=j)) / (2.0 * grid.h[j])
        else:
            g = np.gradient(f, grid.h[j], axis=j)
        out.append(g)
    return np.stack(out)


def _derivative_bound(eos: EquationOfState, grid: Grid, rho: np.ndarray, u: np.ndarray) -> float:
    e2 = eos.eps**2
    c = sound_speed(eos, rho)
    w = w_of_rho(eos, rho)
    gw = _gradient(grid, w)
    div = sum(_gradient(grid, u[j])[j] for j in range(grid.n))
    s2 = np.sum(u * u, axis=0)
    num = np.abs(e2 * (1.0 - e2 * s2) * c * np.sum(u * gw, axis=0) + div)
    val = num / (1.0 - e2 * e2 * s2 * c * c)
    fluid = w > VACUUM_W
    return float(np.max(val[fluid])) if np.any(fluid) else 0.0


def trace_characteristics(eos: EquationOfState, trajectory, seeds) -> CharacteristicTrace:
    """Integrate ``dy/dt = u(t, y)`` with RK4 through the stored snapshots.

    The velocity is interpolated multilinearly in space and linearly in time;
    one RK4 step is taken per snapshot interval.

    Parameters
    ----------
    trajectory : object with ``grid``, ``times`` and ``snapshots`` (each with
        ``rho`` and ``u``), such as :class:`relsym.solver.pipeline.Trajectory`.
    seeds : array of shape ``(n, n_seeds)``
    """
    grid = trajectory.grid
    seeds = np.asarray(seeds, dtype=float).reshape(grid.n, -1)
    for i, (lo, hi) in enumerate(grid.extent):
        if np.any(seeds[i] < lo) or np.any(seeds[i] > hi):
            raise DomainError("seed outside the grid")
    times = np.asarray(trajectory.times, dtype=float)
    snaps = trajectory.snapshots
    if len(snaps) < 2:
        raise DomainError("need at least two snapshots to trace characteristics")

    def vel(k: int, frac: float, y: np.ndarray) -> np.ndarray:
        ua = interpolate(grid, snaps[k].u, y)
        if frac == 0.0:
            return ua
        ub = interpolate(grid, snaps[k + 1].u, y)
        return (1.0 - frac) * ua + frac * ub

    def wrap(y):
        if not grid.periodic:
            return y
        lo = np.array([e[0] for e in grid.extent])[:, None]
        return lo + np.mod(y - lo, grid.lengths[:, None])

    pos = [seeds.copy()]
    y = seeds.copy()
    for k in range(len(times) - 1):
        dt = times[k + 1] - times[k]
        k1 = vel(k, 0.0, y)
        k2 = vel(k, 0.5, wrap(y + 0.5 * dt * k1))
        k3 = vel(k, 0.5, wrap(y + 0.5 * dt * k2))
        k4 = vel(k + 1, 0.0, wrap(y + dt * k3))
        y = wrap(y + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4))
        pos.append(y.copy())
    positions = np.stack(pos)
    wvals = np.stack([
        interpolate(grid, w_of_rho(eos, s.rho), positions[k]) for k, s in enumerate(snaps)
    ])
    rho_top = max(float(np.max(s.rho)) for s in snaps)
    c_r = check_growth_condition(eos, rho_top=max(rho_top, 1e-300)).sup_ratio if rho_top > 0 else 0.0
    G = max(_derivative_bound(eos, grid, s.rho, s.u) for s in snaps)
    return CharacteristicTrace(times, positions, wvals, c_r * G, c_r, G)


def primitive_time_derivative(eos: EquationOfState, rho, u, D_t, S_t):
    """Solve ``J (rho_t, u_t) = (D_t, S_t)`` with ``J`` the Jacobian of the conserved map."""
    e2 = eos.eps**2
    n = u.shape[0]
    p = eos.k * rho**eos.gamma
    dp = eos.k * eos.gamma * rho ** (eos.gamma - 1.0)
    q = rho + e2 * p
    dq = 1.0 + e2 * dp
    G = 1.0 / (1.0 - e2 * np.sum(u * u, axis=0))
    batch = rho.shape
    J = np.zeros(batch + (n + 1, n + 1))
    J[..., 0, 0] = dq * G - e2 * dp
    for k in range(n):
        J[..., 0, 1 + k] = q * 2.0 * e2 * G * G * u[k]
        J[..., 1 + k, 0] = dq * G * u[k]
        for m in range(n):
            J[..., 1 + k, 1 + m] = q * 2.0 * e2 * G * G * u[k] * u[m] + (q * G if k == m else 0.0)
    rhs = np.moveaxis(np.concatenate([D_t[None], S_t]), 0, -1)
    sol = np.linalg.solve(J, rhs[..., None])[..., 0]
    sol = np.moveaxis(sol, -1, 0)
    return sol[0], sol[1:]


def symmetric_time_derivative(eos: EquationOfState, rho, u, rho_t, u_t) -> np.ndarray:
    """Chain rule: time derivative of ``(z_plus, z_minus, udir)`` from that of ``(rho, u)``."""
    c = sound_speed(eos, rho)
    q = rho + eos.eps**2 * eos.k * rho**eos.gamma
    s = np.sqrt(np.sum(u * u, axis=0))
    ud = u / s
    w_t = c / q * rho_t
    v_t = np.sum(ud * u_t, axis=0) / (1.0 - eos.eps**2 * s * s)
    ud_t = (u_t - ud * np.sum(ud * u_t, axis=0)) / s
    return np.concatenate([(v_t + w_t)[None], (v_t - w_t)[None], ud_t])


def formulation_residual(eos: EquationOfState, field: ConservativeField,
                         dissipation: float = 0.0) -> float:
    """Max-norm gap between the symmetric right-hand side and the chain-rule
    image of the conservative right-hand side, on a moving non-vacuum state."""
    grid = field.grid
    Uc = field.as_array()
    dU, _ = conservative_rhs(eos, grid, Uc)
    rho, u = con2prim(eos, field.D, field.S)
    rho_t, u_t = primitive_time_derivative(eos, rho, u, dU[0], dU[1:])
    Wt = symmetric_time_derivative(eos, rho, u, rho_t, u_t)
    zp, zm, ud = fields_to_symmetric(eos, rho, u)
    W = np.concatenate([zp[None], zm[None], ud])
    res = symmetric_rhs(eos, grid, W, dissipation=dissipation)
    return float(np.max(np.abs(res.dWdt - Wt)))
