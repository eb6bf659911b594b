"""Strong-stability-preserving Runge-Kutta time stepping."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import CFLViolation

__all__ = ["ssprk3_step", "stable_dt", "check_cfl", "DEFAULT_CFL"]

DEFAULT_CFL = 0.4


def ssprk3_step(rhs: Callable[[np.ndarray], np.ndarray], y: np.ndarray, dt: float,
                post: Callable[[np.ndarray], np.ndarray] | None = None) -> np.ndarray:
    """One step of the three-stage, third-order Shu-Osher scheme.

    ``post`` is applied to every stage value (e.g. a positivity floor); it
    defaults to the identity.
    """
    post = post or (lambda z: z)
    y1 = post(y + dt * rhs(y))
    y2 = post(0.75 * y + 0.25 * (y1 + dt * rhs(y1)))
    return post(y / 3.0 + 2.0 / 3.0 * (y2 + dt * rhs(y2)))


def stable_dt(h, max_speed: float, cfl: float = DEFAULT_CFL) -> float:
    """cfl * min(h) / max_speed (infinite when nothing moves)."""
    hmin = float(np.min(h))
    if max_speed <= 0:
        return np.inf
    return cfl * hmin / max_speed


def check_cfl(dt: float, h, max_speed: float, cfl: float = DEFAULT_CFL) -> None:
    """Raise CFLViolation if ``dt`` exceeds the stability bound."""
    if not (dt > 0):
        raise CFLViolation(f"time step must be positive, got {dt}")
    limit = stable_dt(h, max_speed, cfl)
    if dt > limit * (1.0 + 1e-12):
        raise CFLViolation(f"dt = {dt:.6g} exceeds the CFL bound {limit:.6g} (cfl {cfl})")
