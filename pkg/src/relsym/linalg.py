"""Small symmetric eigenvalue problems by cyclic Jacobi rotations.

The matrices involved here are at most 5x5 but come in large batches (one per
grid cell or per random sample), so the sweeps are vectorized over all leading
axes.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = ["jacobi_eigenvalues", "min_symmetric_eigenvalue", "SYMMETRY_TOL"]

SYMMETRY_TOL = 1.0e-10
OFFDIAG_TOL = 1.0e-12
MAX_SWEEPS = 60


def _check_symmetric(M: np.ndarray) -> None:
    if M.ndim < 2 or M.shape[-1] != M.shape[-2]:
        raise DomainError(f"expected square matrices, got shape {M.shape}")
    asym = np.max(np.abs(M - np.swapaxes(M, -1, -2)), initial=0.0)
    if asym > SYMMETRY_TOL:
        raise DomainError(f"matrix is not symmetric (max asymmetry {asym:.3g})")


def jacobi_eigenvalues(M, tol: float = OFFDIAG_TOL) -> np.ndarray:
    """Eigenvalues of symmetric matrices, sorted ascending along the last axis.

    Parameters
    ----------
    M : array_like, shape (..., d, d)
        Symmetric input (asymmetry above 1e-10 is rejected).
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm of every matrix in the
        batch falls below ``tol`` times ``max(1, ||M||_F)``.
    """
    A = np.array(M, dtype=float)
    _check_symmetric(A)
    A = 0.5 * (A + np.swapaxes(A, -1, -2))
    d = A.shape[-1]
    batch = A.shape[:-2]
    A = A.reshape((-1, d, d))
    scale = np.maximum(1.0, np.sqrt(np.sum(A * A, axis=(-1, -2))))
    offmask = ~np.eye(d, dtype=bool)
    for _ in range(MAX_SWEEPS):
        off = np.sqrt(np.sum(A[:, offmask] ** 2, axis=-1))
        if np.all(off <= tol * scale):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[:, p, q]
                rotate = np.abs(apq) > 1e-300
                if not np.any(rotate):
                    continue
                app, aqq = A[:, p, p], A[:, q, q]
                safe = np.where(rotate, apq, 1.0)
                theta = (aqq - app) / (2.0 * safe)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(theta == 0, 1.0, t)
                t = np.where(rotate, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J with J the (p, q) plane rotation
                Ap = A[:, :, p].copy()
                Aq = A[:, :, q].copy()
                A[:, :, p] = c[:, None] * Ap - s[:, None] * Aq
                A[:, :, q] = s[:, None] * Ap + c[:, None] * Aq
                Ap = A[:, p, :].copy()
                Aq = A[:, q, :].copy()
                A[:, p, :] = c[:, None] * Ap - s[:, None] * Aq
                A[:, q, :] = s[:, None] * Ap + c[:, None] * Aq
    eig = np.sort(np.diagonal(A, axis1=-2, axis2=-1), axis=-1)
    return eig.reshape(batch + (d,))


def min_symmetric_eigenvalue(M, tol: float = OFFDIAG_TOL):
    """Smallest eigenvalue of a symmetric matrix (or a batch of them)."""
    lam = jacobi_eigenvalues(M, tol)[..., 0]
    return float(lam) if np.ndim(lam) == 0 else lam
