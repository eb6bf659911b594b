"""Symmetric hyperbolic formulation of the relativistic Euler equations with vacuum.

Modules
-------
eos              barotropic equation of state and the modified density ``w``
kinematics       physical <-> symmetric variables ``(z_plus, z_minus, udir)``
lorentz          boosts, velocity composition and speed bounds
symmetric_system coefficient matrices and the positivity certificate
solver           grids, right-hand sides, time stepping and complete solves
cli              scenario runner and verification driver
"""

from .eos import EquationOfState, rho_of_w, sound_speed, w_of_rho
from .errors import (
    AdmissibilityError,
    CertificateSearchError,
    CFLViolation,
    DegenerateError,
    DomainError,
    RecoveryError,
    RelsymError,
    SingularSystemError,
)
from .kinematics import PhysicalState, SymmetricState, from_symmetric, to_symmetric
from .lorentz import Boost, boost_coords, compose_velocity, phi, speed_bounds
from .symmetric_system import certify_positivity, evaluate_certificate, verify_certificate

__version__ = "0.1.0"

__all__ = [
    "EquationOfState",
    "w_of_rho",
    "rho_of_w",
    "sound_speed",
    "PhysicalState",
    "SymmetricState",
    "to_symmetric",
    "from_symmetric",
    "Boost",
    "boost_coords",
    "compose_velocity",
    "phi",
    "speed_bounds",
    "certify_positivity",
    "evaluate_certificate",
    "verify_certificate",
    "RelsymError",
    "DomainError",
    "AdmissibilityError",
    "DegenerateError",
    "SingularSystemError",
    "CertificateSearchError",
    "CFLViolation",
    "RecoveryError",
]
