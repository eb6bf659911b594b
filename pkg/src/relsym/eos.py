"""Polytropic equation of state and the modified mass density w(rho).

The modified density is

    w(rho) = int_0^rho c(s) / q(s) ds,   c = sqrt(p'),  q = rho + eps^2 p,

which stays finite at vacuum for every polytrope with gamma > 1.  Near
``rho = 0`` the integrand behaves like ``s**((gamma - 3) / 2)``; the change of
variable ``s = sigma**(2 / (gamma - 1))`` removes that singularity and leaves
the smooth integrand ``1 / (1 + eps^2 k sigma^2)``, which is integrated with
vectorized adaptive Gauss-Legendre quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError, DomainError

__all__ = [
    "EquationOfState",
    "GrowthReport",
    "pressure",
    "sound_speed",
    "enthalpy_density",
    "w_of_rho",
    "rho_of_w",
    "check_growth_condition",
]

# largest eps*c allowed by the default density cap
SOUND_SPEED_MARGIN = 0.99
DEFAULT_RHO_MAX_NONRELATIVISTIC = 1.0e6
QUAD_ABS_TOL = 1.0e-13
INVERSE_REL_TOL = 1.0e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class EquationOfState:
    """Polytrope ``p = k * rho**gamma`` with inverse light speed ``eps``.

    ``rho_max`` defaults to the largest density with ``eps * c(rho) <= 0.99``,
    capped at ``1e6``, which is also the default when ``eps == 0``.  Construction fails when the admissible
    range ``[0, rho_max]`` violates ``0 <= p' < eps**-2``.
    """

    k: float = 1.0
    gamma: float = 2.0
    eps: float = 0.0
    rho_max: float | None = None
    _w_max: float = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k, gamma, eps = float(self.k), float(self.gamma), float(self.eps)
        if not (k > 0 and math.isfinite(k)):
            raise DomainError(f"pressure scale k must be positive, got {self.k}")
        if not (gamma > 1 and math.isfinite(gamma)):
            raise DomainError(f"adiabatic exponent must exceed 1, got {self.gamma}")
        if not (0.0 <= eps < 1.0):
            raise DomainError(f"eps must lie in [0, 1), got {self.eps}")
        if self.rho_max is None:
            if eps > 0:
                # in logs: tiny eps would overflow; the cap keeps the eps -> 0 limit continuous
                log_rho = (2.0 * math.log(SOUND_SPEED_MARGIN / eps) - math.log(k * gamma)) / (gamma - 1.0)
                rho_max = math.exp(min(log_rho, math.log(DEFAULT_RHO_MAX_NONRELATIVISTIC)))
            else:
                rho_max = DEFAULT_RHO_MAX_NONRELATIVISTIC
        else:
            rho_max = float(self.rho_max)
            if not (rho_max > 0 and math.isfinite(rho_max)):
                raise DomainError(f"rho_max must be positive and finite, got {self.rho_max}")
        # c is increasing, so the hyperbolicity bound only needs checking at rho_max
        c_top = math.sqrt(k * gamma * rho_max ** (gamma - 1.0))
        if eps * c_top >= 1.0:
            raise AdmissibilityError(
                f"eps*c(rho_max) = {eps * c_top:.6g} >= 1: sound speed reaches the light speed"
            )
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "rho_max", rho_max)
        object.__setattr__(self, "_w_max", float(_w_unchecked(self, np.asarray(rho_max))))

    @property
    def w_max(self) -> float:
        """w(rho_max), the upper end of the admissible modified-density range."""
        return self._w_max

    def with_eps(self, eps: float) -> "EquationOfState":
        """Same polytrope with a different light-speed parameter (rho_max re-derived)."""
        return EquationOfState(self.k, self.gamma, eps)


def _as_density(eos: EquationOfState, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(rho)) or np.any(rho < 0):
        raise DomainError("density must be finite and non-negative")
    if np.any(rho > eos.rho_max * (1 + 1e-14)):
        raise DomainError(f"density exceeds rho_max = {eos.rho_max:.6g}")
    return rho


def _scalar_or_array(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def pressure(eos: EquationOfState, rho):
    """k * rho**gamma."""
    rho = _as_density(eos, rho)
    return _scalar_or_array(eos.k * rho**eos.gamma)


def _sound_speed_unchecked(eos: EquationOfState, rho: np.ndarray) -> np.ndarray:
    return np.sqrt(eos.k * eos.gamma * rho ** (eos.gamma - 1.0))


def sound_speed(eos: EquationOfState, rho):
    """sqrt(p'(rho)); raises AdmissibilityError where eps*c >= 1."""
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr < 0) or np.any(~np.isfinite(rho_arr)):
        raise DomainError("density must be finite and non-negative")
    c = _sound_speed_unchecked(eos, rho_arr)
    if eos.eps > 0 and np.any(eos.eps * c >= 1.0):
        raise AdmissibilityError("eps*c(rho) >= 1: sound speed reaches the light speed")
    _as_density(eos, rho_arr)
    return _scalar_or_array(c)


def enthalpy_density(eos: EquationOfState, rho):
    """q(rho) = rho + eps^2 p(rho)."""
    rho = _as_density(eos, rho)
    return _scalar_or_array(rho + eos.eps**2 * eos.k * rho**eos.gamma)


def _gauss_legendre(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[..., None] + half[..., None] * _GL_NODES
    return half * np.sum(_GL_WEIGHTS * f(x), axis=-1)


def _adaptive_quad(f, a: np.ndarray, b: np.ndarray, tol: float, depth: int = 0) -> np.ndarray:
    """Vectorized adaptive Gauss-Legendre: bisect every interval whose
    one-panel and two-panel estimates differ by more than ``tol``."""
    coarse = _gauss_legendre(f, a, b)
    m = 0.5 * (a + b)
    fine = _gauss_legendre(f, a, m) + _gauss_legendre(f, m, b)
    bad = np.abs(fine - coarse) > tol
    if depth >= 40 or not np.any(bad):
        return fine
    out = fine.copy()
    left = _adaptive_quad(f, a[bad], m[bad], 0.5 * tol, depth + 1)
    right = _adaptive_quad(f, m[bad], b[bad], 0.5 * tol, depth + 1)
    out[bad] = left + right
    return out


def _w_prefactor(eos: EquationOfState) -> float:
    return 2.0 * math.sqrt(eos.k * eos.gamma) / (eos.gamma - 1.0)


def _w_of_sigma(eos: EquationOfState, sigma: np.ndarray) -> np.ndarray:
    """w as a function of sigma = rho**((gamma-1)/2)."""
    pref = _w_prefactor(eos)
    a2 = eos.eps**2 * eos.k
    flat = np.atleast_1d(sigma).astype(float).ravel()
    vals = _adaptive_quad(lambda s: 1.0 / (1.0 + a2 * s * s), np.zeros_like(flat), flat, QUAD_ABS_TOL / pref)
    return (pref * vals).reshape(np.shape(sigma))


def _w_unchecked(eos: EquationOfState, rho: np.ndarray) -> np.ndarray:
    return _w_of_sigma(eos, rho ** ((eos.gamma - 1.0) / 2.0))


def w_of_rho(eos: EquationOfState, rho):
    """Modified mass density int_0^rho c/q ds (vectorized)."""
    rho = _as_density(eos, rho)
    return _scalar_or_array(_w_unchecked(eos, rho))


def rho_of_w(eos: EquationOfState, w):
    """Inverse of :func:`w_of_rho` by bracketed bisection refined with Newton.

    The iteration runs in ``sigma = rho**((gamma-1)/2)``, where w is nearly
    linear; ``w == 0`` maps to exactly ``0``.  Since w is concave in sigma with
    slope at most ``pref``, ``w / pref`` is a lower bound on the root and Newton
    started there climbs monotonically without cancellation, even when the
    root is many orders of magnitude below the bracket.
    """
    w = np.asarray(w, dtype=float)
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise DomainError("modified density w must be finite and non-negative")
    w_max = eos.w_max
    if np.any(w > w_max * (1 + 1e-13)):
        raise DomainError(f"modified density exceeds w(rho_max) = {w_max:.6g}")
    flat = np.minimum(w.ravel(), w_max)
    expo = (eos.gamma - 1.0) / 2.0
    lo = np.zeros_like(flat)
    hi = np.full_like(flat, eos.rho_max**expo)
    for _ in range(6):
        mid = 0.5 * (lo + hi)
        below = _w_of_sigma(eos, mid) < flat
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    pref = _w_prefactor(eos)
    lo = np.maximum(lo, np.minimum(flat / pref, hi))
    sigma = lo.copy()
    a2 = eos.eps**2 * eos.k
    active = flat > 0
    for _ in range(60):
        if not np.any(active):
            break
        s = sigma[active]
        resid = _w_of_sigma(eos, s) - flat[active]
        step = resid * (1.0 + a2 * s * s) / pref
        new = s - step
        # stay inside the bracket; fall back to bisection when Newton leaves it
        l, h = lo[active], hi[active]
        l = np.where(resid < 0, np.maximum(l, s), l)
        h = np.where(resid > 0, np.minimum(h, s), h)
        outside = (new < l) | (new > h)
        new = np.where(outside, 0.5 * (l + h), new)
        lo[active], hi[active] = l, h
        sigma[active] = new
        converged = np.abs(new - s) <= 0.25 * INVERSE_REL_TOL * expo * np.maximum(new, 1e-300)
        idx = np.flatnonzero(active)
        active[idx[converged]] = False
    sigma[~(flat > 0)] = 0.0
    rho = sigma ** (1.0 / expo)
    rho = np.minimum(rho, eos.rho_max)
    return _scalar_or_array(rho.reshape(w.shape))


@dataclass(frozen=True)
class GrowthReport:
    """Sampled behaviour of c(rho)/w(rho) on (0, rho_max]."""

    sup_ratio: float
    ratio_near_vacuum: float
    log_slope_near_vacuum: float
    finite: bool
    samples: int


def check_growth_condition(eos: EquationOfState, decades: int = 14, per_decade: int = 8,
                           rho_top: float | None = None,
                           slope_tol: float = 1e-3) -> GrowthReport:
    """Check that c/w stays bounded as rho -> 0 over a geometric sample.

    The ratio is declared finite when its log-log slope against rho over the
    two smallest decades is not negative (up to ``slope_tol``): a ratio that
    grows like ``rho**-s`` with ``s > 0`` blows up at vacuum.
    """
    top = eos.rho_max if rho_top is None else min(float(rho_top), eos.rho_max)
    rho = top * np.logspace(-decades, 0, decades * per_decade + 1)
    c = _sound_speed_unchecked(eos, rho)
    w = _w_unchecked(eos, rho)
    ratio = c / w
    tail = slice(0, 2 * per_decade + 1)
    slope = float(np.polyfit(np.log(rho[tail]), np.log(ratio[tail]), 1)[0])
    finite = bool(np.all(np.isfinite(ratio)) and slope >= -slope_tol)
    return GrowthReport(
        sup_ratio=float(np.max(ratio)),
        ratio_near_vacuum=float(ratio[0]),
        log_slope_near_vacuum=slope,
        finite=finite,
        samples=int(rho.size),
    )
