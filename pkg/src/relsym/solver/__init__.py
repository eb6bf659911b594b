"""Method-of-lines solvers for the symmetric and conservative formulations."""

from .conservative import con2prim, conservative_rhs, rhs_conservative
from .diagnostics import formulation_residual, support_radius, trace_characteristics
from .fields import ConservativeField, FluidField, SymmetricField, to_conservative
from .grid import Grid
from .pipeline import (
    Snapshot,
    Solution,
    TameRunReport,
    Trajectory,
    solve_boosted,
    solve_lab,
    solve_nonrelativistic,
)
from .symmetric import rhs_symmetric, symmetric_rhs
from .timestep import check_cfl, ssprk3_step, stable_dt

__all__ = [
    "Grid",
    "FluidField",
    "SymmetricField",
    "ConservativeField",
    "to_conservative",
    "con2prim",
    "conservative_rhs",
    "rhs_conservative",
    "symmetric_rhs",
    "rhs_symmetric",
    "ssprk3_step",
    "stable_dt",
    "check_cfl",
    "Snapshot",
    "Trajectory",
    "TameRunReport",
    "Solution",
    "solve_boosted",
    "solve_nonrelativistic",
    "solve_lab",
    "support_radius",
    "trace_characteristics",
    "formulation_residual",
]
