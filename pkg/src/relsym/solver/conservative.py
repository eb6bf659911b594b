"""Reference solver for the conservative form of the relativistic Euler equations.

Fifth-order WENO reconstruction of Lax-Friedrichs split fluxes, with the
splitting speed taken as the largest characteristic speed over each
interface's stencil.  The primitive state is recovered from ``(D, S)`` by a
monotone scalar root in the pressure.
"""

from __future__ import annotations

import numpy as np

from ..eos import EquationOfState
from ..errors import RecoveryError
from .fields import ConservativeField, FluidField
from .grid import Grid, pad

__all__ = [
    "con2prim",
    "characteristic_speeds",
    "physical_flux",
    "conservative_rhs",
    "rhs_conservative",
    "VACUUM_DENSITY",
]

VACUUM_DENSITY = 1.0e-14
_RECOVERY_TOL = 1.0e-14


def con2prim(eos: EquationOfState, D, S, max_iter: int = 80):
    """Recover ``(rho, u)`` from conserved ``(D, S)``.

    With ``m = |S|`` and ``E = D + eps^2 p`` one has ``u = S / E`` and
    ``rho(p) = D - eps^2 m^2 / E``; the pressure solves
    ``k rho(p)^gamma - p = 0`` on ``[0, k min(D, rho_max)^gamma]``.  On that
    bracket ``eps c <= 1`` and ``eps m / E <= 1``, so the equation is strictly
    decreasing and its root is unique; a second, inadmissible root with
    ``rho > rho_max`` can exist beyond it.  Cells with ``D <= 1e-14`` are
    returned as vacuum at rest.

    Raises
    ------
    RecoveryError
        If ``D < eps |S|`` or no root with ``rho <= rho_max`` exists.
    """
    D = np.asarray(D, dtype=float)
    S = np.asarray(S, dtype=float)
    m = np.sqrt(np.sum(S * S, axis=0))
    eps2 = eos.eps**2
    if not (np.all(np.isfinite(D)) and np.all(np.isfinite(S))):
        raise RecoveryError("non-finite conserved variables")
    vac = D <= VACUUM_DENSITY
    if np.any(D[~vac] < eos.eps * m[~vac] * (1.0 - 1e-12) - _RECOVERY_TOL):
        raise RecoveryError("D < eps |S|: no admissible state matches the conserved variables")
    Dv = np.where(vac, 1.0, D)
    mv = np.where(vac, 0.0, np.minimum(m, Dv / eos.eps if eos.eps > 0 else m))
    if eos.eps == 0:
        rho = Dv
        p = eos.k * rho**eos.gamma
    else:
        lo = np.zeros_like(Dv)
        hi = eos.k * np.minimum(Dv, eos.rho_max) ** eos.gamma
        r_hi = np.maximum(Dv - eps2 * mv * mv / (Dv + eps2 * hi), 0.0)
        if np.any(eos.k * r_hi**eos.gamma - hi > 1e-12 * np.maximum(hi, 1.0)):
            raise RecoveryError("no state with rho <= rho_max matches the conserved variables")
        p = hi.copy()
        for _ in range(max_iter):
            E = Dv + eps2 * p
            rho = np.maximum(Dv - eps2 * mv * mv / E, 0.0)
            f = eos.k * rho**eos.gamma - p
            lo = np.where(f > 0, p, lo)
            hi = np.where(f <= 0, p, hi)
            df = eos.k * eos.gamma * rho ** (eos.gamma - 1.0) * eps2 * eps2 * mv * mv / (E * E) - 1.0
            p_new = p - f / df
            out = (p_new <= lo) | (p_new >= hi)
            p_new = np.where(out, 0.5 * (lo + hi), p_new)
            done = np.abs(p_new - p) <= 1e-15 * np.maximum(p, 1e-300)
            p = p_new
            if np.all(done):
                break
        E = Dv + eps2 * p
        rho = np.maximum(Dv - eps2 * mv * mv / E, 0.0)
    E = Dv + eps2 * p
    u = S / E
    rho = np.where(vac, 0.0, rho)
    u = np.where(vac, 0.0, u)
    return rho, u


def characteristic_speeds(eos: EquationOfState, rho, u, axis: int):
    """Acoustic characteristic speeds ``(lambda_minus, lambda_plus)`` along ``axis``."""
    c = np.sqrt(eos.k * eos.gamma * np.asarray(rho, dtype=float) ** (eos.gamma - 1.0))
    e2 = eos.eps**2
    s2 = np.sum(u * u, axis=0)
    uk = u[axis]
    root = c * np.sqrt(np.maximum((1.0 - e2 * s2) * (1.0 - e2 * uk * uk - e2 * c * c * (s2 - uk * uk)), 0.0))
    den = 1.0 - e2 * e2 * s2 * c * c
    base = uk * (1.0 - e2 * c * c)
    return (base - root) / den, (base + root) / den


def physical_flux(eos: EquationOfState, rho, u, axis: int) -> np.ndarray:
    """Flux of ``(D, S)`` along ``axis``."""
    p = eos.k * rho**eos.gamma
    q = rho + eos.eps**2 * p
    qg = q / (1.0 - eos.eps**2 * np.sum(u * u, axis=0))
    F = np.empty((u.shape[0] + 1,) + rho.shape)
    F[0] = qg * u[axis]
    F[1:] = qg * u * u[axis]
    F[1 + axis] += p
    return F


_D = (0.1, 0.6, 0.3)


def _weno_left(v0, v1, v2, v3, v4):
    """Value at the right face of the centre cell ``v2`` (WENO-Z weights)."""
    p0 = (2 * v0 - 7 * v1 + 11 * v2) / 6.0
    p1 = (-v1 + 5 * v2 + 2 * v3) / 6.0
    p2 = (2 * v2 + 5 * v3 - v4) / 6.0
    b0 = 13 / 12 * (v0 - 2 * v1 + v2) ** 2 + 0.25 * (v0 - 4 * v1 + 3 * v2) ** 2
    b1 = 13 / 12 * (v1 - 2 * v2 + v3) ** 2 + 0.25 * (v1 - v3) ** 2
    b2 = 13 / 12 * (v2 - 2 * v3 + v4) ** 2 + 0.25 * (3 * v2 - 4 * v3 + v4) ** 2
    tau = np.abs(b0 - b2)
    tiny = 1e-40
    a0 = _D[0] * (1 + (tau / (b0 + tiny)) ** 2)
    a1 = _D[1] * (1 + (tau / (b1 + tiny)) ** 2)
    a2 = _D[2] * (1 + (tau / (b2 + tiny)) ** 2)
    return (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2)


def _axis_rhs(eos: EquationOfState, grid: Grid, Uc: np.ndarray, axis: int):
    g = 3
    Up = pad(Uc, grid, g, axis)
    rho, u = con2prim(eos, Up[0], Up[1:])
    F = physical_flux(eos, rho, u, axis)
    lm, lp = characteristic_speeds(eos, rho, u, axis)
    alpha = np.maximum(np.abs(lm), np.abs(lp))
    ax = 1 + axis
    Up = np.moveaxis(Up, ax, -1)
    F = np.moveaxis(F, ax, -1)
    alpha = np.moveaxis(alpha, axis, -1)
    N = Up.shape[-1] - 2 * g
    # interface j sits between padded cells j + 2 and j + 3, j = 0..N
    a_face = alpha[..., 0 : N + 1]
    for s in range(1, 6):
        a_face = np.maximum(a_face, alpha[..., s : N + 1 + s])

    def cells(arr, s):
        return arr[..., s : N + 1 + s]

    fp = [0.5 * (cells(F, s) + a_face * cells(Up, s)) for s in range(5)]
    fm = [0.5 * (cells(F, s) - a_face * cells(Up, s)) for s in range(1, 6)]
    flux = _weno_left(*fp) + _weno_left(fm[4], fm[3], fm[2], fm[1], fm[0])
    div = (flux[..., 1:] - flux[..., :-1]) / grid.h[axis]
    return np.moveaxis(-div, -1, ax), float(np.max(alpha))


def conservative_rhs(eos: EquationOfState, grid: Grid, Uc: np.ndarray):
    """Time derivative of the stacked conserved array ``(D, S)`` and the
    largest characteristic speed over all axes."""
    out = np.zeros_like(Uc)
    speed = 0.0
    for axis in range(grid.n):
        d, s = _axis_rhs(eos, grid, Uc, axis)
        out += d
        speed = max(speed, s)
    return out, speed


def rhs_conservative(eos: EquationOfState, field: ConservativeField) -> ConservativeField:
    """Semi-discrete time derivative of a conservative field."""
    d, _ = conservative_rhs(eos, field.grid, field.as_array())
    return ConservativeField.from_array(field.grid, d)


def to_fluid(eos: EquationOfState, field: ConservativeField) -> FluidField:
    rho, u = con2prim(eos, field.D, field.S)
    return FluidField(field.grid, rho, u)
