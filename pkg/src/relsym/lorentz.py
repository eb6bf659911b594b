"""Lorentz boosts of coordinates and velocities.

A boost with reference velocity ``U`` maps

    t' = gamma (t - eps^2 U.x)
    x' = -gamma U t + (I + (gamma - 1) Ut Ut^T) x

and velocities by ``u' = Phi(eps u, eps U) / eps``.  With ``eps == 0`` both
reduce to the Galilean shift ``x' = x - U t``, ``u' = u - U``.

Vectors are stored component-first: ``x.shape == (n, *batch)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, DegenerateError, DomainError

__all__ = [
    "Boost",
    "boost_coords",
    "boost_coords_rapidity",
    "compose_velocity",
    "phi",
    "transformed_speed_sq",
    "speed_bounds",
    "first_axis_rotation",
]


@dataclass(frozen=True)
class Boost:
    """Reference frame moving with velocity ``U``; ``eps`` is the inverse light speed.

    ``U = 0`` is allowed and gives the identity map.
    """

    U: np.ndarray
    eps: float = 0.0

    def __post_init__(self):
        U = np.array(self.U, dtype=float).reshape(-1)
        if U.size not in (1, 2, 3) or not np.all(np.isfinite(U)):
            raise DomainError("U must be a finite vector with 1, 2 or 3 components")
        eps = float(self.eps)
        if not (0.0 <= eps < 1.0):
            raise DomainError(f"eps must lie in [0, 1), got {self.eps}")
        if eps * np.linalg.norm(U) >= 1.0:
            raise AdmissibilityError("eps*|U| >= 1: boost velocity reaches the light speed")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "eps", eps)

    @classmethod
    def from_rapidity(cls, V: float, direction, eps: float) -> "Boost":
        """Boost with rapidity ``V`` along ``direction`` (eps |U| = tanh(eps V))."""
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        speed = V if eps == 0 else math.tanh(eps * V) / eps
        return cls(speed * d, eps)

    @property
    def n(self) -> int:
        return self.U.size

    @property
    def speed(self) -> float:
        return float(np.linalg.norm(self.U))

    @property
    def gamma(self) -> float:
        """Lorentz factor 1 / sqrt(1 - eps^2 |U|^2)."""
        return 1.0 / math.sqrt(1.0 - (self.eps * self.speed) ** 2)

    @property
    def V(self) -> float:
        """Rapidity: eps |U| = tanh(eps V); equals |U| when eps = 0."""
        if self.eps == 0:
            return self.speed
        return math.atanh(self.eps * self.speed) / self.eps

    @property
    def direction(self) -> np.ndarray:
        """U / |U| (the first basis vector when U = 0)."""
        s = self.speed
        if s == 0:
            e = np.zeros(self.n)
            e[0] = 1.0
            return e
        return self.U / s

    def inverse(self) -> "Boost":
        return Boost(-self.U, self.eps)


def _batch_vec(x, n: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[:1] != (n,):
        raise DomainError(f"expected a vector field with leading dimension {n}, got shape {x.shape}")
    return x


def _dot(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.tensordot(a, x, axes=(0, 0))


def _expand(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    return v.reshape((v.size,) + (1,) * (x.ndim - 1))


def boost_coords(b: Boost, t, x):
    """Apply the boost to event(s) ``(t, x)``; ``x`` has shape ``(n, *batch)``."""
    x = _batch_vec(x, b.n)
    t = np.asarray(t, dtype=float)
    U = _expand(b.U, x)
    if b.eps == 0:
        return t + 0.0, x - U * t
    g = b.gamma
    d = _expand(b.direction, x)
    t_new = g * (t - b.eps**2 * _dot(b.U, x))
    x_new = -g * U * t + x + (g - 1.0) * d * _dot(b.direction, x)
    return t_new, x_new


def boost_coords_rapidity(b: Boost, t, x):
    """Same map as :func:`boost_coords`, written with hyperbolic functions of eps V.

    Along the boost direction ``x_par' = cosh(eps V) x_par - sinh(eps V) t / eps``
    and ``t' = cosh(eps V) t - eps sinh(eps V) x_par``; transverse components are
    unchanged.
    """
    x = _batch_vec(x, b.n)
    t = np.asarray(t, dtype=float)
    d = _expand(b.direction, x)
    x_par = _dot(b.direction, x)
    x_perp = x - d * x_par
    if b.eps == 0:
        return t + 0.0, x_perp + d * (x_par - b.speed * t)
    zeta = b.eps * b.V
    ch, sh = math.cosh(zeta), math.sinh(zeta)
    t_new = ch * t - b.eps * sh * x_par
    x_par_new = ch * x_par - sh * t / b.eps
    return t_new, x_perp + d * x_par_new


def phi(X, Z) -> np.ndarray:
    """Dimensionless velocity map Phi(X, Z) with X = eps u, Z = eps U.

    ``X`` may be batched as ``(n, *batch)``; ``Z`` is a single vector.
    """
    Z = np.asarray(Z, dtype=float).reshape(-1)
    X = _batch_vec(X, Z.size)
    r1 = float(np.linalg.norm(Z))
    if r1 >= 1.0:
        raise AdmissibilityError("|Z| >= 1")
    if np.any(np.sum(X * X, axis=0) >= 1.0):
        raise AdmissibilityError("|X| >= 1")
    if r1 == 0:
        return X.copy()
    ginv = math.sqrt(1.0 - r1 * r1)
    zt = Z / r1
    par = _dot(zt, X)
    num = ginv * X + (1.0 - ginv) * _expand(zt, X) * par - _expand(Z, X)
    return num / (1.0 - _dot(Z, X))


def compose_velocity(b: Boost, u) -> np.ndarray:
    """Velocity seen in the boosted frame, ``u' = Phi(eps u, eps U) / eps``.

    ``u`` has shape ``(n,)`` or ``(n, *batch)``.
    """
    u = _batch_vec(u, b.n)
    if np.any(~np.isfinite(u)):
        raise DomainError("velocity must be finite")
    if b.eps == 0:
        return u - _expand(b.U, u)
    if np.any(b.eps * np.sqrt(np.sum(u * u, axis=0)) >= 1.0):
        raise AdmissibilityError("eps*|u| >= 1: velocity reaches the light speed")
    return phi(b.eps * u, b.eps * b.U) / b.eps


def transformed_speed_sq(X, Z):
    """Closed form of |Phi(X, Z)|^2 in the frame where Z lies on the first axis.

    With ``X1 = X.Z/|Z|`` and ``|X_perp|^2 = |X|^2 - X1^2``::

        ((X1 - r1)^2 + (1 - r1^2) |X_perp|^2) / (1 - r1 X1)^2
    """
    Z = np.asarray(Z, dtype=float).reshape(-1)
    X = _batch_vec(X, Z.size)
    r1 = float(np.linalg.norm(Z))
    if r1 == 0:
        out = np.sum(X * X, axis=0)
    else:
        x1 = _dot(Z / r1, X)
        perp_sq = np.maximum(np.sum(X * X, axis=0) - x1 * x1, 0.0)
        out = ((x1 - r1) ** 2 + (1.0 - r1 * r1) * perp_sq) / (1.0 - r1 * x1) ** 2
    return float(out) if np.ndim(out) == 0 else out


def speed_bounds(r0: float, r1: float) -> tuple[float, float]:
    """Sharp bounds delta1 <= |Phi(X, Z)| <= delta2 for |X| <= r0, |Z| = r1."""
    if not (0.0 < r0 < r1 < 1.0):
        raise DomainError(f"need 0 < r0 < r1 < 1, got r0={r0}, r1={r1}")
    return (r1 - r0) / (1.0 - r0 * r1), (r0 + r1) / (1.0 + r0 * r1)


def first_axis_rotation(Z) -> np.ndarray:
    """Orthogonal matrix R (a Householder reflection or identity) with R Z = |Z| e1."""
    Z = np.asarray(Z, dtype=float).reshape(-1)
    r = np.linalg.norm(Z)
    if r == 0:
        raise DegenerateError("cannot align the zero vector")
    e1 = np.zeros_like(Z)
    e1[0] = 1.0
    h = Z / r - e1
    hn = np.linalg.norm(h)
    if hn < 1e-15:
        return np.eye(Z.size)
    h /= hn
    return np.eye(Z.size) - 2.0 * np.outer(h, h)
