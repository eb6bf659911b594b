"""Matrices of the symmetric hyperbolic form and the positivity certificate.

For the unknown ``W = (z_plus, z_minus, udir)`` (length ``d = n + 2``) the
system reads ``A0 dW/dt + sum_j Aj dW/dx_j = 0`` with

    A0 = diag(a0, b0, c0 |u|^2 I)
    Aj = [[a1 udir_j, 0,         a2 |u| e_j         ],
          [0,         b1 udir_j, -a2 |u| e_j        ],
          [a2 |u| e_j^T, -a2 |u| e_j^T, c0 |u|^2 u_j I]]

where ``e_j`` is row ``j`` of ``E(u) = I - udir udir^T`` and

    a0 = 1 + eps^2 |u| c,   b0 = 1 - eps^2 |u| c,   c0 = 2 / (1 - eps^2 |u|^2),
    a1 = |u| + c,           b1 = |u| - c,           a2 = c.

After a boost with velocity U and the shear ``t'' = t' + eps^2 U.x'`` the time
matrix becomes ``B0 = A0(W') + eps^2 sum_j U_j Aj(W')`` while ``Bj = Aj(W')``.
In the dimensionless variables ``X = eps u``, ``Y = eps c``, ``Z = eps U`` the
form ``Q(xi; X, Y, Z) = <B0 D xi, D xi>`` with ``D = diag(1, 1, eps I)`` depends
on ``(X, Y, Z)`` only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .eos import EquationOfState, rho_of_w, sound_speed
from .errors import AdmissibilityError, CertificateSearchError, DegenerateError, DomainError
from .kinematics import SymmetricState, speed_of_modified
from .linalg import jacobi_eigenvalues, min_symmetric_eigenvalue
from .lorentz import Boost, phi

__all__ = [
    "Coefficients",
    "SystemMatrices",
    "coefficients",
    "system_matrices",
    "boosted_time_matrix",
    "state_matrices",
    "assemble_A",
    "assemble_B",
    "quad_form_B",
    "QComponents",
    "q_components",
    "quad_form_Q",
    "q_matrix",
    "PositivityCertificate",
    "evaluate_certificate",
    "certify_positivity",
    "CertificateReport",
    "verify_certificate",
]

A_VALUES = (1.5, 2.0, 3.0, 4.0)
R_STAR_START = 0.5
R_STAR_FLOOR = 1.0e-6
POSITIVITY_MARGIN = 1.0e-10


class Coefficients(NamedTuple):
    a0: np.ndarray
    b0: np.ndarray
    c0: np.ndarray
    a1: np.ndarray
    b1: np.ndarray
    a2: np.ndarray


@dataclass(frozen=True)
class SystemMatrices:
    """Time matrix ``A0`` (shape ``(*batch, d, d)``) and space matrices ``A``
    (shape ``(n, *batch, d, d)``)."""

    A0: np.ndarray
    A: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A0.shape[-1]


def coefficients(c, speed, eps: float) -> Coefficients:
    """Scalar coefficients of the symmetric form at sound speed ``c`` and speed ``|u|``."""
    c = np.asarray(c, dtype=float)
    s = np.asarray(speed, dtype=float)
    if np.any(eps * eps * c * s >= 1.0) or np.any(eps * s >= 1.0):
        raise AdmissibilityError("eps^2 c |u| >= 1 or eps |u| >= 1")
    return Coefficients(
        a0=1.0 + eps**2 * s * c,
        b0=1.0 - eps**2 * s * c,
        c0=2.0 / (1.0 - eps**2 * s * s),
        a1=s + c,
        b1=s - c,
        a2=c + 0.0 * s,
    )


def system_matrices(c, speed, udir, eps: float) -> SystemMatrices:
    """Assemble ``A0`` and ``Aj`` from sound speed, speed and direction.

    Parameters
    ----------
    c, speed : arrays of shape ``batch``
    udir : array of shape ``(n, *batch)``, unit vectors
    eps : float
    """
    udir = np.asarray(udir, dtype=float)
    n = udir.shape[0]
    batch = udir.shape[1:]
    c = np.broadcast_to(np.asarray(c, dtype=float), batch)
    s = np.broadcast_to(np.asarray(speed, dtype=float), batch)
    co = coefficients(c, s, eps)
    d = n + 2
    A0 = np.zeros(batch + (d, d))
    A0[..., 0, 0] = co.a0
    A0[..., 1, 1] = co.b0
    for k in range(n):
        A0[..., 2 + k, 2 + k] = co.c0 * s * s
    A = np.zeros((n,) + batch + (d, d))
    cross = co.a2 * s
    for j in range(n):
        Aj = A[j]
        Aj[..., 0, 0] = co.a1 * udir[j]
        Aj[..., 1, 1] = co.b1 * udir[j]
        for k in range(n):
            e_jk = (1.0 if j == k else 0.0) - udir[j] * udir[k]
            Aj[..., 0, 2 + k] = Aj[..., 2 + k, 0] = cross * e_jk
            Aj[..., 1, 2 + k] = Aj[..., 2 + k, 1] = -cross * e_jk
            Aj[..., 2 + k, 2 + k] = co.c0 * s * s * s * udir[j]
    return SystemMatrices(A0, A)


def boosted_time_matrix(mats: SystemMatrices, U, eps: float) -> np.ndarray:
    """B0 = A0 + eps^2 sum_j U_j Aj."""
    U = np.asarray(U, dtype=float).reshape(-1)
    return mats.A0 + eps**2 * np.tensordot(U, mats.A, axes=(0, 0))


def state_matrices(eos: EquationOfState, z_plus, z_minus, udir) -> SystemMatrices:
    """Matrices for gridded symmetric variables (``udir`` component-first)."""
    z_plus = np.asarray(z_plus, dtype=float)
    z_minus = np.asarray(z_minus, dtype=float)
    w = np.maximum(0.5 * (z_plus - z_minus), 0.0)
    v = np.maximum(0.5 * (z_plus + z_minus), 0.0)
    c = sound_speed(eos, rho_of_w(eos, w))
    speed = speed_of_modified(eos.eps, v)
    return system_matrices(c, speed, udir, eos.eps)


def assemble_A(eos: EquationOfState, sym: SymmetricState) -> SystemMatrices:
    """``A0`` and ``Aj`` at a single state."""
    return state_matrices(eos, sym.z_plus, sym.z_minus, sym.udir)


def assemble_B(eos: EquationOfState, sym: SymmetricState, b: Boost) -> SystemMatrices:
    """Boosted matrices ``B0`` and ``Bj = Aj`` at a state given in the boosted frame."""
    if b.n != sym.udir.size:
        raise DomainError("boost and state dimensions differ")
    if b.eps != eos.eps:
        raise DomainError("boost and equation of state use different eps")
    mats = assemble_A(eos, sym)
    return SystemMatrices(boosted_time_matrix(mats, b.U, eos.eps), mats.A)


def quad_form_B(eos: EquationOfState, sym: SymmetricState, b: Boost, xi) -> float:
    """<B0 xi, xi>."""
    xi = np.asarray(xi, dtype=float)
    B0 = assemble_B(eos, sym, b).A0
    return float(xi @ B0 @ xi)


class QComponents(NamedTuple):
    """Pieces of Q: ``Q = Q1 xi1^2 + Q2 xi2^2 + Q3 |xih|^2 + 2 (xi1 - xi2) g.xih``."""

    phi_norm: np.ndarray
    S: np.ndarray
    Q1: np.ndarray
    Q2: np.ndarray
    Q3: np.ndarray
    g: np.ndarray  # Y |Phi| E(Phi~) Z, shape (n, *batch)


def q_components(X, Y, Z) -> QComponents:
    """Coefficients of Q(xi; X, Y, Z); ``X`` may be batched as ``(n, *batch)``."""
    Z = np.asarray(Z, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1)
    Y = np.asarray(Y, dtype=float)
    if np.any(Y < 0) or np.any(Y >= 1):
        raise AdmissibilityError("Y must lie in [0, 1)")
    P = phi(X, Z)
    pn = np.sqrt(np.sum(P * P, axis=0))
    if np.any(pn < 1e-15):
        raise DegenerateError("Phi(X, Z) = 0: the form is undefined at X = Z")
    pt = P / pn
    S = np.tensordot(Z, pt, axes=(0, 0))
    Y = np.broadcast_to(Y, pn.shape)
    Q1 = 1.0 + pn * Y + S * (pn + Y)
    Q2 = 1.0 - pn * Y + S * (pn - Y)
    Q3 = 2.0 * pn * pn / (1.0 - pn * pn) * (1.0 + pn * S)
    Zb = Z.reshape((Z.size,) + (1,) * (P.ndim - 1))
    g = Y * pn * (Zb - pt * S)
    return QComponents(pn, S, Q1, Q2, Q3, g)


def quad_form_Q(xi, X, Y, Z):
    """Q(xi; X, Y, Z) = Q1 xi1^2 + Q2 xi2^2 + Q3 |xih|^2 + Q13 + Q23."""
    xi = np.asarray(xi, dtype=float)
    qc = q_components(X, Y, Z)
    xih = xi[2:]
    gx = np.sum(qc.g * xih, axis=0)
    q13 = 2.0 * gx * xi[0]
    q23 = -2.0 * gx * xi[1]
    out = qc.Q1 * xi[0] ** 2 + qc.Q2 * xi[1] ** 2 + qc.Q3 * np.sum(xih * xih, axis=0) + q13 + q23
    return float(out) if np.ndim(out) == 0 else out


def q_matrix(X, Y, Z) -> np.ndarray:
    """Symmetric matrix of Q, shape ``(*batch, n + 2, n + 2)``."""
    qc = q_components(X, Y, Z)
    n = qc.g.shape[0]
    batch = qc.phi_norm.shape
    M = np.zeros(batch + (n + 2, n + 2))
    M[..., 0, 0] = qc.Q1
    M[..., 1, 1] = qc.Q2
    for k in range(n):
        M[..., 2 + k, 2 + k] = qc.Q3
        M[..., 0, 2 + k] = M[..., 2 + k, 0] = qc.g[k]
        M[..., 1, 2 + k] = M[..., 2 + k, 1] = -qc.g[k]
    return M


@dataclass(frozen=True)
class PositivityCertificate:
    """Worst-case constants showing Q (hence B0) is uniformly positive.

    The bounds hold for every ``|X| <= r_star`` and ``Y in [0, Y0]`` with
    ``Z = a r_star * direction``.  ``margin`` is the smallest eigenvalue of the
    3x3 surrogate matrix ``[[q1, 0, -q4], [0, q2, -q4], [-q4, -q4, q3]]`` and is
    a rigorous lower bound for the smallest eigenvalue of Q.
    """

    Y0: float
    a: float
    r_star: float
    Z: np.ndarray
    phi_upper: float
    phi_lower: float
    q1: float
    q2: float
    q3: float
    q4: float
    k0: float
    D_star: float
    margin: float
    k1: float
    K1: float
    K2: float
    K3: float
    K4: float
    surrogates: dict = field(default_factory=dict, compare=False)

    @property
    def r1(self) -> float:
        return self.a * self.r_star

    @property
    def kappa(self) -> float:
        """Admissible bound on eps^2 |u|^2 for initial data covered by the certificate."""
        return self.r_star**2

    @property
    def n(self) -> int:
        return self.Z.size

    @property
    def valid(self) -> bool:
        return bool(
            self.a * self.r_star < 1
            and self.k0 < 1
            and min(self.q1, self.q2, self.q3) > 0
            and self.D_star > 0
        )

    def qstar_matrix(self) -> np.ndarray:
        return qstar_matrix(self.q1, self.q2, self.q3, self.q4)


def qstar_matrix(q1: float, q2: float, q3: float, q4: float) -> np.ndarray:
    """Matrix of Q*(x, y, z) = q1 x^2 + q2 y^2 + q3 z^2 - 2 q4 (x + y) z."""
    return np.array([[q1, 0.0, -q4], [0.0, q2, -q4], [-q4, -q4, q3]])


def evaluate_certificate(Y0: float, a: float, r_star: float, n: int = 3,
                         direction=None) -> PositivityCertificate:
    """Compute every worst-case constant for one candidate ``(a, r_star)``.

    ``Y0 = 0`` is accepted (the cross terms then vanish).  The returned object
    may be invalid; check :attr:`PositivityCertificate.valid`.
    """
    if not (0.0 <= Y0 < 1.0):
        raise DomainError(f"Y0 must lie in [0, 1), got {Y0}")
    if not (a > 1.0 and 0.0 < r_star < 1.0 and a * r_star < 1.0):
        raise DomainError(f"need a > 1, 0 < r_star and a*r_star < 1, got a={a}, r_star={r_star}")
    if direction is None:
        direction = np.eye(n)[0]
    direction = np.asarray(direction, dtype=float).reshape(-1)
    direction = direction / np.linalg.norm(direction)
    r0, r1 = r_star, a * r_star
    p_up = (r0 + r1) / (1.0 + r0 * r1)
    p_lo = (r1 - r0) / (1.0 - r0 * r1)
    k0 = r1 * (p_up + Y0)
    q1 = (1.0 - Y0**2) * (1.0 - k0)
    q2 = min((1.0 - Y0**2) * (1.0 - r1 * p_up) / (1.0 + Y0 * p_up), 1.0 - p_up * (Y0 + r1))
    q3 = 2.0 * p_lo**2 / (1.0 - p_lo**2) * (1.0 - p_up * r1)
    q4 = Y0 * p_up * r1
    with np.errstate(divide="ignore"):
        D_star = q3 - q4**2 / q1 - q4**2 / q2 if q1 > 0 and q2 > 0 else -math.inf
    margin = float(np.linalg.eigvalsh(qstar_matrix(q1, q2, q3, q4))[0])
    k1 = a * (a + 2.0)
    K1 = (1.0 - Y0**2) * (1.0 - k1 * r_star)
    K2 = 0.5 * (1.0 - Y0**2) * (1.0 - a * (a + 1.0) * r_star**2)
    K3 = (2.0 * (a - 1.0) ** 2 * (1.0 - a * (a + 1.0) * r_star**2)
          / ((1.0 - a * r_star**2) ** 2 - (a - 1.0) ** 2 * r_star**2))
    K4 = Y0 * (a + 1.0) * a
    if K1 > 0 and K2 > 0:
        d_lower = (K3 - K4 * (1.0 / K1 + 1.0 / K2) * r_star**2) * r_star**2
    else:
        d_lower = -math.inf
    return PositivityCertificate(
        Y0=float(Y0), a=float(a), r_star=float(r_star), Z=r1 * direction,
        phi_upper=p_up, phi_lower=p_lo, q1=q1, q2=q2, q3=q3, q4=q4, k0=k0,
        D_star=D_star, margin=margin, k1=k1, K1=K1, K2=K2, K3=K3, K4=K4,
        surrogates={"D_star_lower": d_lower},
    )


def certify_positivity(Y0: float, n: int = 3) -> PositivityCertificate:
    """Search ``r_star = 0.5, 0.25, ...`` and ``a in (1.5, 2, 3, 4)`` for a valid certificate.

    Raises
    ------
    CertificateSearchError
        If nothing is found before ``r_star`` drops below 1e-6.
    """
    if not (0.0 < Y0 < 1.0):
        raise DomainError(f"Y0 must lie in (0, 1), got {Y0}")
    r_star = R_STAR_START
    while r_star >= R_STAR_FLOOR:
        for a in A_VALUES:
            if a * r_star >= 1.0:
                continue
            cert = evaluate_certificate(Y0, a, r_star, n)
            if cert.valid:
                return cert
        r_star *= 0.5
    raise CertificateSearchError(f"no certificate found for Y0={Y0} down to r_star={R_STAR_FLOOR}")


@dataclass
class CertificateReport:
    """Outcome of sampling a certificate's region."""

    n_samples: int
    seed: int
    eps: float
    min_q_eigenvalue: float
    min_b0_eigenvalue: float
    qstar_min_eigenvalue: float
    qstar_positive_definite: bool
    D_star_positive: bool
    failures: list = field(default_factory=list)
    worst_X: np.ndarray | None = None
    worst_Y: float = math.nan

    @property
    def surrogate_consistent(self) -> bool:
        """Q* is positive definite exactly when D* > 0."""
        return self.qstar_positive_definite == self.D_star_positive

    @property
    def passed(self) -> bool:
        return (not self.failures and self.surrogate_consistent
                and self.qstar_positive_definite and self.min_b0_eigenvalue >= POSITIVITY_MARGIN)

    def to_text(self) -> str:
        lines = [
            f"status: {'pass' if self.passed else 'fail'}",
            f"samples: {self.n_samples} (seed {self.seed}, eps {self.eps:g})",
            f"min eigenvalue of Q: {self.min_q_eigenvalue:.6e}",
            f"min eigenvalue of B0: {self.min_b0_eigenvalue:.6e}",
            f"min eigenvalue of Q*: {self.qstar_min_eigenvalue:.6e}",
            f"Q* positive definite: {self.qstar_positive_definite}; D* > 0: {self.D_star_positive}",
        ]
        for X, Y, lam in self.failures:
            lines.append(f"FAIL X={np.array2string(np.asarray(X), precision=6)} Y={Y:.6g} min_eig={lam:.6e}")
        return "\n".join(lines) + "\n"


def sample_ball(rng: np.random.Generator, n: int, radius: float, size: int) -> np.ndarray:
    """Uniform samples in the closed n-ball, returned as ``(n, size)``; a share
    of the samples is placed on the boundary sphere where the bounds are tight."""
    g = rng.standard_normal((n, size))
    g /= np.linalg.norm(g, axis=0)
    r = radius * rng.random(size) ** (1.0 / n)
    r[: size // 4] = radius
    return g * r


def verify_certificate(cert: PositivityCertificate, n_samples: int = 10_000, seed: int = 0,
                       eps: float = 0.5, max_failures: int = 20) -> CertificateReport:
    """Sample ``|X| <= r_star``, ``Y in [0, Y0]`` and check Q and B0 stay positive.

    For each sample the smallest eigenvalue of the matrix of Q and of the
    dimensional B0 (at the given ``eps``, with ``u = X/eps``, ``c = Y/eps``,
    ``U = Z/eps``) are computed by Jacobi iteration.  Both must be at least
    1e-10; Q must also respect the certificate's margin.
    """
    rng = np.random.default_rng(seed)
    n = cert.n
    X = sample_ball(rng, n, cert.r_star, n_samples)
    Y = cert.Y0 * rng.random(n_samples)
    Y[: n_samples // 8] = cert.Y0
    lam_q = jacobi_eigenvalues(q_matrix(X, Y, cert.Z))[:, 0]
    # dimensional check at the requested eps
    P = phi(X, cert.Z)
    pn = np.linalg.norm(P, axis=0)
    mats = system_matrices(Y / eps, pn / eps, P / pn, eps)
    B0 = boosted_time_matrix(mats, cert.Z / eps, eps)
    lam_b = jacobi_eigenvalues(B0)[:, 0]
    lam_star = min_symmetric_eigenvalue(cert.qstar_matrix())
    floor = max(POSITIVITY_MARGIN, lam_star - 1e-12)
    bad = np.flatnonzero((lam_q < floor) | (lam_b < POSITIVITY_MARGIN))
    failures = [(X[:, i].copy(), float(Y[i]), float(min(lam_q[i], lam_b[i]))) for i in bad[:max_failures]]
    worst = int(np.argmin(lam_q))
    return CertificateReport(
        n_samples=n_samples, seed=seed, eps=eps,
        min_q_eigenvalue=float(lam_q.min()), min_b0_eigenvalue=float(lam_b.min()),
        qstar_min_eigenvalue=lam_star, qstar_positive_definite=bool(lam_star > 0),
        D_star_positive=bool(cert.D_star > 0), failures=failures,
        worst_X=X[:, worst].copy(), worst_Y=float(Y[worst]),
    )
