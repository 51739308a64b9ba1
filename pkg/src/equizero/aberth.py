"""Batched Aberth-Ehrlich simultaneous root iteration.

Polynomials are given by ascending coefficient rows ``c[:, k]`` (coefficient of
z^k).  Every row must have nonzero constant and leading terms; zero roots and
roots at infinity are split off by the caller.

Roots with |z| > 1 are updated through the reversed polynomial in y = 1/z,
which keeps Horner's rule away from overflow for binomially weighted
coefficients.  Starting points lie on the circles given by the upper convex
hull of ``(k, log|c_k|)`` (the Newton polygon); a circle of Cauchy-bound radius
would need on the order of N log(bound) steps for SU(2) polynomials.
"""

from __future__ import annotations

import numpy as np

DEFAULT_TOL = 1e-13
MAX_ITER = 500


class AberthConvergenceError(RuntimeError):
    """Raised when the iteration stalls; carries the best iterate and its residuals."""

    def __init__(self, message, roots, residuals):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


def _upper_hull(x, y):
    hull = []
    for p in zip(x, y):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    return hull


def initial_guess(c: np.ndarray, sigma: float = 0.7) -> np.ndarray:
    """Newton-polygon starting points for one coefficient row."""
    n = len(c) - 1
    mag = np.abs(c)
    k = np.nonzero(mag)[0]
    hull = _upper_hull(k.astype(float), np.log(mag[k]))
    z = np.empty(n, dtype=complex)
    pos = 0
    for i in range(len(hull) - 1):
        (k0, l0), (k1, l1) = hull[i], hull[i + 1]
        count = int(round(k1 - k0))
        radius = np.exp((l0 - l1) / (k1 - k0))
        angles = 2 * np.pi * np.arange(count) / count + 2 * np.pi * i / n + sigma
        z[pos:pos + count] = radius * np.exp(1j * angles)
        pos += count
    return z


def newton_ratio(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z) / p'(z) for rows of coefficients ``c`` (B, n+1) at roots ``z`` (B, n)."""
    n = c.shape[1] - 1
    inside = np.abs(z) <= 1.0
    x = np.where(inside, z, 1.0 / np.where(inside, 1.0, z))
    p = np.where(inside, c[:, n, None], c[:, 0, None])
    dp = np.zeros_like(z)
    for k in range(n - 1, -1, -1):
        dp = dp * x + p
        p = p * x + np.where(inside, c[:, k, None], c[:, n - k, None])
    with np.errstate(divide="ignore", invalid="ignore"):
        r_in = p / dp
        r_out = z / (n - x * dp / p)
    ratio = np.where(inside, r_in, r_out)
    return np.where(p == 0, 0.0, ratio)


def log_residual(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Relative residual ``log(|p(z)| / sum_k |c_k| |z|^k)`` for rows ``c`` and roots ``z``.

    This is the componentwise backward error of ``z``; values near log(eps)
    mean ``z`` is an exact root of a polynomial within rounding of ``c``.
    """
    n = c.shape[1] - 1
    inside = np.abs(z) <= 1.0
    x = np.where(inside, z, 1.0 / np.where(inside, 1.0, z))
    ax = np.abs(x)
    mag = np.abs(c)
    p = np.where(inside, c[:, n, None], c[:, 0, None])
    q = np.where(inside, mag[:, n, None], mag[:, 0, None])
    for k in range(n - 1, -1, -1):
        p = p * x + np.where(inside, c[:, k, None], c[:, n - k, None])
        q = q * ax + np.where(inside, mag[:, k, None], mag[:, n - k, None])
    with np.errstate(divide="ignore"):
        return np.log(np.abs(p)) - np.log(q)


def aberth(c, z0=None, tol: float = DEFAULT_TOL, maxiter: int = MAX_ITER):
    """Simultaneous roots of each coefficient row.

    Returns ``(roots, converged, iterations)`` with ``roots`` of shape (B, n).
    """
    c = np.atleast_2d(np.asarray(c, dtype=complex))
    B, n1 = c.shape
    n = n1 - 1
    if n < 1:
        return np.empty((B, 0), dtype=complex), np.ones(B, bool), 0
    if np.any(c[:, 0] == 0) or np.any(c[:, n] == 0):
        raise ValueError("constant and leading coefficients must be nonzero")
    c = c / np.max(np.abs(c), axis=1, keepdims=True)
    z = np.array([initial_guess(row) for row in c]) if z0 is None else np.array(z0, dtype=complex)
    done = np.zeros((B, n), dtype=bool)
    it = 0
    for it in range(1, maxiter + 1):
        rows = np.nonzero(~done.all(axis=1))[0]
        if len(rows) == 0:
            it -= 1
            break
        zr = z[rows]
        ratio = newton_ratio(c[rows], zr)
        diff = zr[:, :, None] - zr[:, None, :]
        idx = np.arange(n)
        diff[:, idx, idx] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.sum(1.0 / diff, axis=2)
            step = ratio / (1.0 - ratio * s)
        step = np.where(np.isfinite(step), step, ratio)
        step = np.where(done[rows], 0.0, step)
        zr = zr - step
        z[rows] = zr
        done[rows] |= np.abs(step) <= tol * np.maximum(np.abs(zr), 1e-300)
    return z, done.all(axis=1), it
