"""Exception hierarchy shared by all modules."""


class RelsymError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RelsymError, ValueError):
    """Argument outside the domain of a transform (negative density, w above w(rho_max), ...)."""


class AdmissibilityError(DomainError):
    """State violates the physical constraints: eps*c >= 1 or eps*|u| >= 1."""


class DegenerateError(RelsymError, ValueError):
    """A direction or normalization is undefined (u = 0, X = Z, ...)."""


class SingularSystemError(RelsymError, ArithmeticError):
    """The time-derivative matrix of the symmetric system cannot be inverted."""


class CertificateSearchError(RelsymError, RuntimeError):
    """No positivity certificate was found on the search schedule."""


class CFLViolation(RelsymError, ValueError):
    """Requested time step exceeds the stability bound."""


class RecoveryError(RelsymError, ArithmeticError):
    """Conserved variables do not correspond to an admissible (rho, u)."""
