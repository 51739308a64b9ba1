"""Bergman orthonormal bases for perturbed metrics on O(N) -> CP^1.

The Gram matrix of the reference basis ``S_j`` under

    <s, t> = int h_N(s, t) dV,   h_N = h_FS^N exp(-N rho),   dV = kappa dV_FS,

is computed by quadrature and factored as ``G = L L^H``.  Row ``k`` of
``L^-1`` holds the reference coefficients of the k-th Bergman basis element,
so the new basis is the Gram-Schmidt orthonormalization of the monomials in
their natural order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .finite_diff import chart_laplacian
from .metric import MetricModel, curvature_density
from .projective import ChartPoint, ProjectivePoint, QuadratureRule, cp1_quadrature, normalize_rows
from .sections import basis_values, dim_h0

__all__ = [
    "BergmanBasis",
    "gram_matrix",
    "bergman_rule",
    "bergman_basis",
    "bergman_density",
    "kodaira_pullback_density",
    "curvature_density",
]

MAX_CONDITION = 1e12


def bergman_rule(metric: MetricModel, N: int) -> QuadratureRule:
    """A rule fine enough for the weight ``exp(-N rho)`` as well as the degree-2N monomials."""
    if metric.is_fs:
        return cp1_quadrature(2 * N + 2)
    spread = sum(abs(c) for _, c in metric.rho.terms)
    return cp1_quadrature(2 * N + 48 + 2 * int(np.ceil(N * spread)))


def _node_weights(metric: MetricModel, N: int, rule: QuadratureRule) -> np.ndarray:
    W = rule.points
    return rule.weights * metric.volume_density(W) * metric.norm_sq_factor(W, N)


def gram_matrix(metric: MetricModel, N: int, rule: QuadratureRule | None = None) -> np.ndarray:
    """``G[j, k] = <S_j, S_k>`` under the metric's inner product."""
    if metric.m != 1:
        raise ValueError("Bergman bases are implemented on CP^1")
    rule = rule or bergman_rule(metric, N)
    if rule.degree < 2 * N:
        raise ValueError("rule too coarse")
    B = basis_values(1, N, rule.points)
    w = _node_weights(metric, N, rule)
    G = (B.T * w) @ np.conj(B)
    G = 0.5 * (G + G.conj().T)
    # Jacobi scaling removes the exp(N max|rho|) spread of the diagonal
    s = 1.0 / np.sqrt(np.real(np.diag(G)))
    cond = np.linalg.cond(G * np.outer(s, s))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise ValueError("increase quadrature degree or reduce N")
    return G


@dataclass(frozen=True, eq=False)
class BergmanBasis:
    """Orthonormal basis of H^0(O(N)); ``transform[k]`` = reference coefficients of element k."""

    metric: MetricModel
    N: int
    transform: np.ndarray

    @property
    def coefficients(self) -> np.ndarray:
        """Basis elements as columns of reference coefficients, shape ``(d, d)``."""
        return self.transform.T

    def values(self, points) -> np.ndarray:
        """``e_k(w)`` at unit rows, in the FS trivialization, shape ``(n, d)``."""
        return basis_values(1, self.N, points) @ self.coefficients


_CACHE: dict = {}


def _build_basis(metric: MetricModel, N: int) -> BergmanBasis:
    d = dim_h0(1, N)
    if metric.is_fs:
        T = np.eye(d, dtype=complex)
    else:
        G = gram_matrix(metric, N)
        L = linalg.cholesky(G, lower=True)
        T = linalg.solve_triangular(L, np.eye(d), lower=True)
    T.setflags(write=False)
    return BergmanBasis(metric, N, T)


def bergman_basis(metric: MetricModel, N: int) -> BergmanBasis:
    """Orthonormal basis for ``metric`` in degree N (cached per metric and degree)."""
    key = (repr(metric.to_json()), N)
    if key not in _CACHE:
        _CACHE[key] = _build_basis(metric, N)
    return _CACHE[key]


def _rows(p) -> np.ndarray:
    if isinstance(p, ProjectivePoint):
        return p.homogeneous[None, :]
    if isinstance(p, ChartPoint):
        return p.to_projective().homogeneous[None, :]
    return normalize_rows(p)


def bergman_density(basis: BergmanBasis, p) -> float | np.ndarray:
    """``sum_k ||e_k(p)||^2_{h_N}`` at a point or a stack of unit rows."""
    W = _rows(p)
    vals = np.sum(np.abs(basis.values(W)) ** 2, axis=1) * basis.metric.norm_sq_factor(W, basis.N)
    return float(vals[0]) if isinstance(p, (ProjectivePoint, ChartPoint)) else vals


def _log_sum_sq(basis: BergmanBasis, chart: int):
    """``log sum_k |f_k(z)|^2`` for the local representation in ``chart``."""
    N = basis.N

    def f(z):
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        z = z.ravel()
        one = np.ones_like(z)
        W = np.stack([one, z] if chart == 0 else [z, one], axis=1)
        norm2 = 1.0 + np.abs(z) ** 2
        W = W / np.sqrt(norm2)[:, None]
        total = np.sum(np.abs(basis.values(W)) ** 2, axis=1)
        if np.any(total == 0):
            raise ValueError("base locus")
        return (np.log(total) + N * np.log(norm2)).reshape(shape)

    return f


def kodaira_pullback_density(basis: BergmanBasis, N: int | None = None, p=None) -> float | np.ndarray:
    """Density of ``(1/N) Phi_N^* omega_FS`` against dV_FS.

    With ``f`` the chart representation of the Kodaira map the density is
    ``(1 + |z|^2)^2 lap(log sum |f_k|^2) / (4N)``; the Laplacian uses the
    Richardson five-point stencil and points with |z| > 1 use the other chart.
    """
    N = basis.N if N is None else N
    if N != basis.N:
        raise ValueError("degree does not match the basis")
    W = _rows(p)
    out = np.empty(len(W))
    north = np.abs(W[:, 0]) >= np.abs(W[:, 1])
    for chart, sel in ((0, north), (1, ~north)):
        if not np.any(sel):
            continue
        z = W[sel, 1] / W[sel, 0] if chart == 0 else W[sel, 0] / W[sel, 1]
        lap = chart_laplacian(_log_sum_sq(basis, chart), z)
        out[sel] = (1.0 + np.abs(z) ** 2) ** 2 * lap / (4.0 * N)
    return float(out[0]) if isinstance(p, (ProjectivePoint, ChartPoint)) else out
