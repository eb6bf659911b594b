"""Semi-discrete right-hand side of the symmetric system.

The system is posed as ``M0 dW/dtau + sum_j Mj dW/dy_j = 0`` with

    M0 = A0 + eps^2 sum_j U_j Aj      (the boosted time matrix B0)
    Mj = Aj + s_j M0                  (s = velocity of the grid coordinates)

where ``U`` is the boost velocity (zero for the unboosted system) and ``s``
accounts for grid coordinates ``y = x'' + s tau`` moving relative to the
sheared boosted frame.

Cells are classified per axis:

* vacuum (``w < 1e-10``): the velocity is transported freely, so every
  component of ``W`` obeys ``dW/dtau + a . grad W = 0`` with
  ``a = u' / (1 + eps^2 U.u') + s``; discretized by first-order upwinding;
* fluid cells whose five-point stencil is all fluid: second-order central
  differences plus fourth-order artificial dissipation
  ``-kappa * sigma_j * delta^4 W / h_j`` with ``sigma_j`` the spectral radius
  of ``M0^-1 Mj``;
* fluid cells next to vacuum: first-order characteristic upwinding with
  ``M0^-1 Mj`` split into its positive and negative parts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..eos import EquationOfState, rho_of_w, sound_speed
from ..errors import SingularSystemError
from ..kinematics import ZERO_SPEED, speed_of_modified
from ..symmetric_system import system_matrices
from .fields import SymmetricField
from .grid import Grid, pad

__all__ = ["VACUUM_W", "DISSIPATION", "SymmetricRHS", "symmetric_rhs", "rhs_symmetric"]

VACUUM_W = 1.0e-10
DISSIPATION = 0.05


@dataclass
class SymmetricRHS:
    """Time derivative together with the quantities needed for step control."""

    dWdt: np.ndarray
    rate: float  # max over cells of sum_j (signal speed_j / h_j)
    vacuum: np.ndarray
    min_eig_M0: float


def _vec(x, n: int) -> np.ndarray:
    if x is None:
        return np.zeros(n)
    return np.asarray(x, dtype=float).reshape(n)


def _split(Kt: np.ndarray, L: np.ndarray):
    """Return K, K+ and K- for K = L^-T Kt L^T, with Kt symmetric."""
    lam, R = np.linalg.eigh(Kt)
    LinvT = np.linalg.inv(np.swapaxes(L, -1, -2))
    left = LinvT @ R
    right = np.swapaxes(R, -1, -2) @ np.swapaxes(L, -1, -2)
    K = (left * lam[..., None, :]) @ right
    Kp = (left * np.maximum(lam, 0.0)[..., None, :]) @ right
    Km = (left * np.minimum(lam, 0.0)[..., None, :]) @ right
    return K, Kp, Km, np.max(np.abs(lam), axis=-1)


def symmetric_rhs(eos: EquationOfState, grid: Grid, W: np.ndarray, U=None, shift=None,
                  dissipation: float = DISSIPATION) -> SymmetricRHS:
    """Evaluate ``dW/dtau`` for the stacked unknown ``W`` of shape ``(n + 2, *cells)``.

    Raises
    ------
    SingularSystemError
        If a fluid cell has a time matrix that is not positive definite, which
        happens in the unboosted system wherever ``u = 0``.
    """
    n = grid.n
    eps = eos.eps
    U = _vec(U, n)
    s = _vec(shift, n)
    zp, zm, ud = W[0], W[1], W[2:]
    w = 0.5 * (zp - zm)
    v = 0.5 * (zp + zm)
    vac = w < VACUUM_W
    fluid = ~vac
    rho = rho_of_w(eos, np.clip(w, 0.0, eos.w_max))
    c = sound_speed(eos, rho)
    speed = speed_of_modified(eps, np.maximum(v, 0.0))
    out = np.zeros_like(W)
    rate = np.zeros(grid.shape)
    min_eig = np.inf

    # vacuum cells: free transport of every component
    if np.any(vac):
        uprime = speed * ud
        denom = 1.0 + eps**2 * np.tensordot(U, uprime, axes=(0, 0))
        for j in range(n):
            a = uprime[j] / denom + s[j]
            Wp = pad(W, grid, 1, j)
            sl = [slice(None)] * (W.ndim)
            ax = 1 + j
            sl[ax] = slice(0, -2)
            back = (W - Wp[tuple(sl)]) / grid.h[j]
            sl[ax] = slice(2, None)
            fwd = (Wp[tuple(sl)] - W) / grid.h[j]
            upw = -(np.maximum(a, 0.0) * back + np.minimum(a, 0.0) * fwd)
            out[:, vac] += upw[:, vac]
            rate[vac] += np.abs(a[vac]) / grid.h[j]

    if np.any(fluid):
        idx = np.nonzero(fluid)
        mats = system_matrices(c[idx], speed[idx], ud[(slice(None),) + idx], eps)
        M0 = mats.A0 + eps**2 * np.tensordot(U, mats.A, axes=(0, 0))
        if eps == 0 or not np.any(U):
            if np.any(speed[idx] < ZERO_SPEED):
                raise SingularSystemError("u = 0 in a fluid cell: the unboosted time matrix is singular")
        try:
            L = np.linalg.cholesky(M0)
        except np.linalg.LinAlgError as exc:
            raise SingularSystemError("time matrix is not positive definite in a fluid cell") from exc
        min_eig = float(np.min(np.linalg.eigvalsh(M0)))
        Linv = np.linalg.inv(L)
        LinvT = np.swapaxes(Linv, -1, -2)
        vac_pad_cache = {}
        for j in range(n):
            Mj = mats.A[j] + s[j] * M0
            Kt = Linv @ Mj @ LinvT
            Kt = 0.5 * (Kt + np.swapaxes(Kt, -1, -2))
            K, Kp, Km, sigma = _split(Kt, L)
            h = grid.h[j]
            ax = 1 + j
            Wp = pad(W, grid, 2, j)

            def shifted(k):
                sl = [slice(None)] * W.ndim
                m = grid.shape[j]
                sl[ax] = slice(2 + k, 2 + k + m)
                return Wp[tuple(sl)]

            Wm2, Wm1, W0, W1, W2 = (shifted(k) for k in (-2, -1, 0, 1, 2))
            if j not in vac_pad_cache:
                vp = pad(vac.astype(float), grid, 2, j)
                m = grid.shape[j]
                near = np.zeros(grid.shape, dtype=bool)
                for k in range(-2, 3):
                    sl = [slice(None)] * grid.n
                    sl[j] = slice(2 + k, 2 + k + m)
                    near |= vp[tuple(sl)] > 0.5
                vac_pad_cache[j] = near
            near = vac_pad_cache[j][idx]
            central = ((W1 - Wm1) / (2.0 * h))[(slice(None),) + idx].T
            d4 = ((Wm2 - W0) + (W2 - W0) - 4.0 * ((Wm1 - W0) + (W1 - W0)))[(slice(None),) + idx].T
            back = ((W0 - Wm1) / h)[(slice(None),) + idx].T
            fwd = ((W1 - W0) / h)[(slice(None),) + idx].T
            pure_term = -np.einsum("cij,cj->ci", K, central) - dissipation * sigma[:, None] * d4 / h
            edge_term = -np.einsum("cij,cj->ci", Kp, back) - np.einsum("cij,cj->ci", Km, fwd)
            term = np.where(near[:, None], edge_term, pure_term)
            out[(slice(None),) + idx] += term.T
            rate[idx] += sigma / h
    return SymmetricRHS(out, float(np.max(rate)), vac, min_eig)


def rhs_symmetric(eos: EquationOfState, field: SymmetricField, U=None, shift=None,
                  dissipation: float = DISSIPATION) -> SymmetricField:
    """Time derivative of a symmetric field (components packaged like the input)."""
    res = symmetric_rhs(eos, field.grid, field.as_array(), U, shift, dissipation)
    return SymmetricField.from_array(field.grid, res.dWdt)
