"""Gridded states: physical, symmetric and conservative."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..eos import EquationOfState, enthalpy_density, pressure
from ..errors import AdmissibilityError, DomainError
from ..kinematics import fields_from_symmetric, fields_to_symmetric
from .grid import Grid

__all__ = ["FluidField", "SymmetricField", "ConservativeField", "to_conservative"]


def _check_shapes(grid: Grid, scalar: np.ndarray, vector: np.ndarray, what: str) -> None:
    if scalar.shape != grid.shape or vector.shape != (grid.n,) + grid.shape:
        raise DomainError(f"{what} arrays do not match the grid shape {grid.shape}")


@dataclass(frozen=True)
class FluidField:
    """Density ``rho`` (shape ``cells``) and velocity ``u`` (shape ``(n, *cells)``)."""

    grid: Grid
    rho: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        u = np.asarray(self.u, dtype=float)
        _check_shapes(self.grid, rho, u, "fluid")
        if np.any(rho < 0) or not np.all(np.isfinite(rho)) or not np.all(np.isfinite(u)):
            raise DomainError("density must be non-negative and all values finite")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "u", u)

    @property
    def speed(self) -> np.ndarray:
        return np.sqrt(np.sum(self.u * self.u, axis=0))

    def check_admissible(self, eos: EquationOfState) -> None:
        """Raise AdmissibilityError unless rho <= rho_max and eps |u| < 1."""
        if np.any(self.rho > eos.rho_max):
            raise AdmissibilityError(f"density exceeds rho_max = {eos.rho_max:.6g}")
        if eos.eps > 0 and np.any(eos.eps * self.speed >= 1.0):
            raise AdmissibilityError("eps*|u| >= 1 somewhere in the field")

    def to_symmetric(self, eos: EquationOfState) -> "SymmetricField":
        zp, zm, ud = fields_to_symmetric(eos, self.rho, self.u)
        return SymmetricField(self.grid, zp, zm, ud)


@dataclass(frozen=True)
class SymmetricField:
    """Transformed unknowns ``(z_plus, z_minus, udir)`` on a grid."""

    grid: Grid
    z_plus: np.ndarray
    z_minus: np.ndarray
    udir: np.ndarray

    def __post_init__(self):
        zp = np.asarray(self.z_plus, dtype=float)
        zm = np.asarray(self.z_minus, dtype=float)
        ud = np.asarray(self.udir, dtype=float)
        _check_shapes(self.grid, zp, ud, "symmetric")
        if zm.shape != zp.shape:
            raise DomainError("z_plus and z_minus shapes differ")
        object.__setattr__(self, "z_plus", zp)
        object.__setattr__(self, "z_minus", zm)
        object.__setattr__(self, "udir", ud)

    @classmethod
    def from_array(cls, grid: Grid, W: np.ndarray) -> "SymmetricField":
        return cls(grid, W[0], W[1], W[2:])

    def as_array(self) -> np.ndarray:
        """Stacked unknown of shape ``(n + 2, *cells)``."""
        return np.concatenate([self.z_plus[None], self.z_minus[None], self.udir])

    @property
    def w(self) -> np.ndarray:
        return 0.5 * (self.z_plus - self.z_minus)

    @property
    def v(self) -> np.ndarray:
        return 0.5 * (self.z_plus + self.z_minus)

    def to_fluid(self, eos: EquationOfState) -> FluidField:
        rho, u = fields_from_symmetric(eos, self.z_plus, self.z_minus, self.udir)
        return FluidField(self.grid, rho, u)


@dataclass(frozen=True)
class ConservativeField:
    """Conserved densities ``D`` and momenta ``S`` (shape ``(n, *cells)``)."""

    grid: Grid
    D: np.ndarray
    S: np.ndarray

    def __post_init__(self):
        D = np.asarray(self.D, dtype=float)
        S = np.asarray(self.S, dtype=float)
        _check_shapes(self.grid, D, S, "conservative")
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "S", S)

    @classmethod
    def from_array(cls, grid: Grid, Uc: np.ndarray) -> "ConservativeField":
        return cls(grid, Uc[0], Uc[1:])

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.D[None], self.S])

    def total_mass(self) -> float:
        return float(np.sum(self.D) * self.grid.cell_volume())


def to_conservative(eos: EquationOfState, fluid: FluidField) -> ConservativeField:
    """D = q / (1 - eps^2 |u|^2) - eps^2 p,  S = q u / (1 - eps^2 |u|^2)."""
    fluid.check_admissible(eos)
    p = pressure(eos, fluid.rho)
    q = enthalpy_density(eos, fluid.rho)
    lorentz_sq = 1.0 / (1.0 - eos.eps**2 * np.sum(fluid.u**2, axis=0))
    return ConservativeField(fluid.grid, q * lorentz_sq - eos.eps**2 * p, q * lorentz_sq * fluid.u)
