"""Velocity-side transforms and the map (rho, u) <-> (z_plus, z_minus, udir).

The modified speed ``v = atanh(eps |u|) / eps`` and the modified density ``w``
combine into the Riemann-invariant-like variables ``z_pm = v +- w``.  The
direction ``udir = u / |u|`` is carried separately, so the full unknown is
``(z_plus, z_minus, udir)`` with ``|udir| = 1``.

Scalar-state functions work on :class:`PhysicalState` / :class:`SymmetricState`;
the ``*_fields`` variants work on gridded arrays with the vector component
first, i.e. ``u.shape == (n, *cells)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eos import EquationOfState, rho_of_w, w_of_rho
from .errors import AdmissibilityError, DegenerateError, DomainError

__all__ = [
    "ZERO_SPEED",
    "PhysicalState",
    "SymmetricState",
    "modified_speed",
    "speed_of_modified",
    "projector",
    "to_symmetric",
    "from_symmetric",
    "fields_to_symmetric",
    "fields_from_symmetric",
]

# speeds below this are treated as u = 0
ZERO_SPEED = 1.0e-13
UNIT_TOL = 1.0e-12
# rounding slack when checking z_plus >= z_minus and z_plus + z_minus >= 0
_ORDER_SLACK = 1.0e-13


def _vec(u) -> np.ndarray:
    u = np.array(u, dtype=float).reshape(-1)
    if u.size not in (1, 2, 3):
        raise DomainError(f"velocity must have 1, 2 or 3 components, got {u.size}")
    return u


@dataclass(frozen=True)
class PhysicalState:
    """Density and velocity at a point."""

    rho: float
    u: np.ndarray

    def __post_init__(self):
        rho = float(self.rho)
        if not (rho >= 0 and np.isfinite(rho)):
            raise DomainError(f"density must be finite and non-negative, got {self.rho}")
        u = _vec(self.u)
        if not np.all(np.isfinite(u)):
            raise DomainError("velocity must be finite")
        u.setflags(write=False)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return self.u.size

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.u))


@dataclass(frozen=True)
class SymmetricState:
    """Transformed state ``(z_plus, z_minus, udir)`` with ``|udir| = 1``."""

    z_plus: float
    z_minus: float
    udir: np.ndarray

    def __post_init__(self):
        udir = _vec(self.udir)
        if abs(np.linalg.norm(udir) - 1.0) > UNIT_TOL:
            raise DomainError(f"udir must be a unit vector, |udir| = {np.linalg.norm(udir)!r}")
        udir.setflags(write=False)
        object.__setattr__(self, "z_plus", float(self.z_plus))
        object.__setattr__(self, "z_minus", float(self.z_minus))
        object.__setattr__(self, "udir", udir)

    @property
    def w(self) -> float:
        return 0.5 * (self.z_plus - self.z_minus)

    @property
    def v(self) -> float:
        return 0.5 * (self.z_plus + self.z_minus)

    def as_vector(self) -> np.ndarray:
        """The unknown W = (z_plus, z_minus, udir) as a flat array."""
        return np.concatenate(([self.z_plus, self.z_minus], self.udir))


def modified_speed(eps: float, speed):
    """v(|u|) = atanh(eps |u|) / eps, and v = |u| when ``eps == 0``."""
    speed = np.asarray(speed, dtype=float)
    if np.any(speed < 0) or np.any(~np.isfinite(speed)):
        raise DomainError("speed must be finite and non-negative")
    if eps == 0:
        out = speed.copy()
    else:
        if np.any(eps * speed >= 1.0):
            raise AdmissibilityError("eps*|u| >= 1: velocity reaches the light speed")
        out = np.arctanh(eps * speed) / eps
    return float(out) if out.ndim == 0 else out


def speed_of_modified(eps: float, v):
    """Inverse of :func:`modified_speed`: tanh(eps v) / eps."""
    v = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(v)):
        raise DomainError("modified speed must be finite")
    out = v.copy() if eps == 0 else np.tanh(eps * v) / eps
    return float(out) if out.ndim == 0 else out


def projector(u) -> np.ndarray:
    """E(u) = I - udir udir^T, the projection orthogonal to ``u``."""
    u = _vec(u)
    s = np.linalg.norm(u)
    if s < ZERO_SPEED:
        raise DegenerateError("projector is undefined at u = 0")
    d = u / s
    return np.eye(u.size) - np.outer(d, d)


def to_symmetric(eos: EquationOfState, state: PhysicalState, fallback=None) -> SymmetricState:
    """Map ``(rho, u)`` to ``(v + w, v - w, u/|u|)``.

    ``fallback`` supplies the direction when ``|u| < ZERO_SPEED``; without it
    the direction is undefined and :class:`DegenerateError` is raised.
    """
    s = state.speed
    v = modified_speed(eos.eps, s)
    w = w_of_rho(eos, state.rho)
    if s < ZERO_SPEED:
        if fallback is None:
            raise DegenerateError("velocity direction undefined at u = 0; pass a fallback")
        udir = _vec(fallback)
        if udir.size != state.n:
            raise DomainError("fallback direction has the wrong dimension")
        udir = udir / np.linalg.norm(udir)
    else:
        udir = state.u / s
    return SymmetricState(v + w, v - w, udir)


def from_symmetric(eos: EquationOfState, sym: SymmetricState) -> PhysicalState:
    """Inverse map: rho = rho_of_w(w), u = speed(v) udir."""
    w, v = sym.w, sym.v
    scale = max(1.0, abs(sym.z_plus), abs(sym.z_minus))
    if w < -_ORDER_SLACK * scale:
        raise DomainError("z_plus < z_minus: negative modified density")
    if v < -_ORDER_SLACK * scale:
        raise DomainError("z_plus + z_minus < 0: negative modified speed")
    rho = rho_of_w(eos, max(w, 0.0))
    speed = speed_of_modified(eos.eps, max(v, 0.0))
    return PhysicalState(rho, speed * sym.udir)


def fields_to_symmetric(eos: EquationOfState, rho, u):
    """Gridded version of :func:`to_symmetric`.

    Parameters
    ----------
    rho : array of shape ``cells``
    u : array of shape ``(n, *cells)``

    Returns
    -------
    z_plus, z_minus : arrays of shape ``cells``
    udir : array of shape ``(n, *cells)``; cells with ``|u| < ZERO_SPEED``
        get the first basis vector.
    """
    rho = np.asarray(rho, dtype=float)
    u = np.asarray(u, dtype=float)
    speed = np.sqrt(np.sum(u * u, axis=0))
    v = modified_speed(eos.eps, speed)
    w = w_of_rho(eos, rho)
    udir = np.zeros_like(u)
    moving = speed >= ZERO_SPEED
    udir[:, moving] = u[:, moving] / speed[moving]
    udir[0, ~moving] = 1.0
    return v + w, v - w, udir


def fields_from_symmetric(eos: EquationOfState, z_plus, z_minus, udir):
    """Gridded version of :func:`from_symmetric`; returns ``(rho, u)``.

    Tiny negative ``w`` or ``v`` produced by rounding are clipped to zero;
    larger violations raise :class:`DomainError`.
    """
    z_plus = np.asarray(z_plus, dtype=float)
    z_minus = np.asarray(z_minus, dtype=float)
    w = 0.5 * (z_plus - z_minus)
    v = 0.5 * (z_plus + z_minus)
    scale = np.maximum(1.0, np.maximum(np.abs(z_plus), np.abs(z_minus)))
    if np.any(w < -_ORDER_SLACK * scale):
        raise DomainError("z_plus < z_minus: negative modified density")
    if np.any(v < -_ORDER_SLACK * scale):
        raise DomainError("z_plus + z_minus < 0: negative modified speed")
    rho = rho_of_w(eos, np.maximum(w, 0.0))
    speed = speed_of_modified(eos.eps, np.maximum(v, 0.0))
    return rho, speed * np.asarray(udir, dtype=float)
