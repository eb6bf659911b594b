"""Independent reference formulas shared by several test modules."""

import numpy as np


def expanded_quad_B(c, u, U, eps, xi):
    """<B0 xi, xi> written out term by term from the scalar coefficients."""
    s = np.linalg.norm(u)
    d = u / s
    a0, b0 = 1 + eps**2 * s * c, 1 - eps**2 * s * c
    c0 = 2 / (1 - eps**2 * s * s)
    a1, b1, a2 = s + c, s - c, c
    x1, x2, xh = xi[0], xi[1], xi[2:]
    E = np.eye(u.size) - np.outer(d, d)
    val = a0 * x1**2 + b0 * x2**2 + c0 * s * s * (xh @ xh)
    for j in range(u.size):
        val += eps**2 * U[j] * (a1 * d[j] * x1**2 + b1 * d[j] * x2**2
                                + 2 * a2 * s * (x1 - x2) * (E[j] @ xh) + c0 * s * s * u[j] * (xh @ xh))
    return val


def collinear_relative_speed(x: float, z: float) -> float:
    """Speed of a particle moving with x seen from a frame moving with z along the same line (c = 1)."""
    return abs(x - z) / (1.0 - x * z)
