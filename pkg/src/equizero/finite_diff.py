"""Finite-difference Laplacians in affine charts, with one Richardson step.

Central differences have an O(h^2) leading error; combining steps h and h/2 as
(4 D(h/2) - D(h)) / 3 cancels it, leaving O(h^4).
"""

import numpy as np

DEFAULT_STEP = 1e-3


def laplacian_5pt(f, z, h):
    """Five-point Laplacian of a real function of one complex variable."""
    z = np.asarray(z, dtype=complex)
    return (f(z + h) + f(z - h) + f(z + 1j * h) + f(z - 1j * h) - 4.0 * f(z)) / h**2


def chart_laplacian(f, z, h=DEFAULT_STEP):
    """Richardson-extrapolated five-point Laplacian d^2/dx^2 + d^2/dy^2."""
    return (4.0 * laplacian_5pt(f, z, h / 2) - laplacian_5pt(f, z, h)) / 3.0


def _real_hessian(f, Z, h):
    # Z: (n, m) complex; returns (n, 2m, 2m) real Hessian in (x_1..x_m, y_1..y_m)
    n, m = Z.shape
    dirs = np.concatenate([np.eye(m), 1j * np.eye(m)], axis=0)
    f0 = f(Z)
    H = np.empty((n, 2 * m, 2 * m))
    for i in range(2 * m):
        ei = h * dirs[i]
        H[:, i, i] = (f(Z + ei) + f(Z - ei) - 2.0 * f0) / h**2
        for j in range(i + 1, 2 * m):
            ej = h * dirs[j]
            val = (f(Z + ei + ej) - f(Z + ei - ej) - f(Z - ei + ej) + f(Z - ei - ej)) / (4.0 * h**2)
            H[:, i, j] = H[:, j, i] = val
    return H


def complex_hessian(f, Z, h=DEFAULT_STEP):
    """Matrix of d^2 f / dz_a d(conj z_b) for a real function of m complex variables.

    ``f`` maps an ``(n, m)`` complex array to ``(n,)`` reals.  Returns ``(n, m, m)``.
    """
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    m = Z.shape[1]
    R = (4.0 * _real_hessian(f, Z, h / 2) - _real_hessian(f, Z, h)) / 3.0
    xx = R[:, :m, :m]
    yy = R[:, m:, m:]
    xy = R[:, :m, m:]
    return 0.25 * ((xx + yy) + 1j * (xy - np.swapaxes(xy, 1, 2)))
