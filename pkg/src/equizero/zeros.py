"""Zero sets of sections and their pairings with test functions.

Two routes to ``((1/N) Z_s, psi omega^(m-1))``:

* ``pair_roots`` sums psi over the roots (CP^1 only),
* ``pair_pl`` integrates by parts with the Poincare-Lelong formula,

    ((1/N) Z_s, psi) = int psi kappa dV_FS + (1/N) int log||s||_{h_N} D(psi) dV_FS,

  where ``kappa`` is the curvature density of the metric and ``D`` the
  operator returned by ``psi.pl_density`` (``2 * Laplacian`` on the sphere).
  The first term is computed by quadrature, the second by plain Monte Carlo.
"""

from __future__ import annotations

import json

import numpy as np
from scipy import linalg

from .aberth import AberthConvergenceError, aberth, log_residual
from .estimate import PairingEstimate
from .haar import haar_unitary
from .metric import MetricModel
from .projective import (
    ProjectivePoint,
    chordal_distance,
    cp1_quadrature,
    cp2_quadrature,
    normalize_rows,
    sample_fs_points,
)
from .sections import Section, _basis_tables, basis_values, multi_indices

__all__ = [
    "ZeroSet",
    "AberthConvergenceError",
    "roots_cp1",
    "root_points_batch",
    "pair_roots",
    "pair_roots_batch",
    "pair_pl",
    "common_zeros_cp2",
]

COEFF_CUTOFF = 1e-13
CLUSTER_RADIUS = 1e-7
RESIDUAL_TOL = 1e-9


class ZeroSet:
    """Roots of a CP^1 section with multiplicities summing to N."""

    m = 1

    def __init__(self, N: int, points, multiplicities):
        self.N = int(N)
        self.points = tuple(points)
        self.multiplicities = tuple(int(k) for k in multiplicities)
        if sum(self.multiplicities) != self.N:
            raise ValueError("multiplicities must sum to N")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(zip(self.points, self.multiplicities))

    @property
    def homogeneous(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, 2), dtype=complex)
        return np.array([p.homogeneous for p in self.points])

    @property
    def weights(self) -> np.ndarray:
        return np.array(self.multiplicities, dtype=float)

    def to_json(self) -> list:
        return [{"point": [[float(c.real), float(c.imag)] for c in p.homogeneous], "mult": k} for p, k in self]

    @classmethod
    def from_json(cls, data) -> "ZeroSet":
        if isinstance(data, str):
            data = json.loads(data)
        pts = [ProjectivePoint(normalize_rows([complex(a, b) for a, b in d["point"]])[0]) for d in data]
        mult = [d["mult"] for d in data]
        return cls(sum(mult), pts, mult)

    def matches(self, other: "ZeroSet", tol: float = 1e-8) -> bool:
        """Equal as multisets of points up to chordal distance ``tol``."""
        a = np.repeat(self.homogeneous, self.multiplicities, axis=0)
        b = np.repeat(other.homogeneous, other.multiplicities, axis=0)
        if len(a) != len(b):
            return False
        if len(a) == 0:
            return True
        D = chordal_distance(a[:, None, :], b[None, :, :])
        from scipy.optimize import linear_sum_assignment

        r, c = linear_sum_assignment(D)
        return bool(D[r, c].max() <= tol)


def _cluster(W: np.ndarray, radius: float = CLUSTER_RADIUS):
    """Group unit rows by chordal proximity; returns representatives and counts."""
    n = len(W)
    labels = np.arange(n)
    if n > 1:
        D = chordal_distance(W[:, None, :], W[None, :, :])
        for i in range(n):
            for j in np.nonzero(D[i, i + 1:] < radius)[0] + i + 1:
                a, b = labels[i], labels[j]
                labels[labels == b] = a
    reps, counts = [], []
    for lab in np.unique(labels):
        idx = np.nonzero(labels == lab)[0]
        reps.append(W[idx[0]])
        counts.append(len(idx))
    return reps, counts


def _split_coeffs(a: np.ndarray):
    """Index range ``[lo, hi]`` of ONB coefficients above the relative cutoff."""
    mag = np.abs(a)
    scale = mag.max()
    if scale == 0:
        raise ValueError("the zero section has no zero set")
    sig = np.nonzero(mag > COEFF_CUTOFF * scale)[0]
    return int(sig[0]), int(sig[-1])


def _finite_roots(a: np.ndarray, N: int, lo: int, hi: int) -> np.ndarray:
    _, log_scale = _basis_tables(1, N)
    b = a[lo:hi + 1] * np.exp(log_scale[lo:hi + 1] - log_scale[lo:hi + 1].max())
    if hi == lo:
        return np.empty(0, dtype=complex)
    z, ok, _ = aberth(b[None, :])
    c = (b / np.abs(b).max())[None, :]
    res = log_residual(c, z)[0]
    if not ok[0] and np.any(res > np.log(RESIDUAL_TOL)):
        raise AberthConvergenceError("root iteration did not converge in 500 steps", z[0], np.exp(res))
    return z[0]


def roots_cp1(s: Section) -> ZeroSet:
    """All N zeros of a CP^1 section, clustered into multiplicities."""
    if s.m != 1:
        raise ValueError("roots_cp1 needs m = 1")
    N = s.N
    lo, hi = _split_coeffs(s.coeffs)
    z = _finite_roots(s.coeffs, N, lo, hi)
    W = [np.stack([np.ones_like(z), z], axis=1)]
    W.append(np.tile([1.0 + 0j, 0.0], (lo, 1)))
    W.append(np.tile([0.0 + 0j, 1.0], (N - hi, 1)))
    W = normalize_rows(np.concatenate(W)) if N > 0 else np.empty((0, 2), complex)
    if len(W) == 0:
        return ZeroSet(N, [], [])
    reps, counts = _cluster(W)
    return ZeroSet(N, [ProjectivePoint(r) for r in reps], counts)


def root_points_batch(C: np.ndarray, N: int) -> np.ndarray:
    """Zeros of many CP^1 sections at once, repeated by multiplicity.

    ``C`` holds ONB coefficients as columns, shape ``(N+1, B)``.  Returns unit
    homogeneous rows, shape ``(B, N, 2)``.  Sections with negligible extreme
    coefficients fall back to :func:`roots_cp1`.
    """
    C = np.asarray(C, dtype=complex)
    B = C.shape[1]
    out = np.empty((B, N, 2), dtype=complex)
    if N == 0:
        return out
    mag = np.abs(C)
    scale = mag.max(axis=0)
    generic = (mag[0] > COEFF_CUTOFF * scale) & (mag[N] > COEFF_CUTOFF * scale)
    _, log_scale = _basis_tables(1, N)
    g = np.nonzero(generic)[0]
    if len(g):
        b = (C[:, g] * np.exp(log_scale - log_scale.max())[:, None]).T
        z, ok, _ = aberth(b)
        if not ok.all():
            bad = ~ok
            cn = b[bad] / np.abs(b[bad]).max(axis=1, keepdims=True)
            res = log_residual(cn, z[bad])
            if np.any(res > np.log(RESIDUAL_TOL)):
                raise AberthConvergenceError("root iteration did not converge in 500 steps", z[bad], np.exp(res))
        W = np.stack([np.ones_like(z), z], axis=-1)
        far = np.abs(z) > 1
        W[far] = np.stack([1.0 / z[far], np.ones(far.sum())], axis=-1)
        out[g] = W / np.linalg.norm(W, axis=-1, keepdims=True)
    for i in np.nonzero(~generic)[0]:
        zs = roots_cp1(Section(1, N, C[:, i]))
        out[i] = np.repeat(zs.homogeneous, zs.multiplicities, axis=0)
    return out


def pair_roots(zs: ZeroSet, psi) -> PairingEstimate:
    """``(1/N) sum mult * psi(root)``."""
    if zs.N == 0:
        raise ValueError("degree-0 sections have no zeros")
    val = float(zs.weights @ psi(zs.homogeneous)) / zs.N
    return PairingEstimate(val, 0.0, len(zs))


def pair_roots_batch(C: np.ndarray, N: int, psi) -> np.ndarray:
    """Root pairings for every column of ``C``; shape ``(B,)``."""
    P = root_points_batch(C, N)
    return psi(P.reshape(-1, 2)).reshape(P.shape[:2]).mean(axis=1)


def _log_norms(C, m, N, W, metric):
    with np.errstate(divide="ignore"):
        out = np.log(np.abs(basis_values(m, N, W) @ C))
    if not metric.is_fs:
        out = out - 0.5 * N * metric.rho_at(W)[:, None]
    return out


def exact_term(psi, metric: MetricModel) -> float:
    """``int psi kappa dV_FS`` by quadrature (exact for constants: kappa has unit mass)."""
    if psi.is_constant:
        return float(psi.constant_value) if hasattr(psi, "constant_value") else float(psi(np.eye(metric.m + 1)[:1])[0])
    if metric.m == 1:
        extra = 0 if metric.is_fs else metric.rho.degree + 4
        rule = cp1_quadrature(max(psi.degree + extra, 2))
        W = rule.points
        return float(rule.integrate(psi(W) * metric.volume_density(W)))
    if metric.m == 2 and metric.is_fs:
        W, w = cp2_quadrature(psi.degree)
        return float(psi(W) @ w)
    raise ValueError("metric/dimension mismatch")


def pair_pl(s: Section, psi, metric: MetricModel | None = None, n_mc: int = 20_000,
            rng: np.random.Generator | None = None) -> PairingEstimate:
    """Poincare-Lelong estimate of ``((1/N) Z_s, psi omega^(m-1))``."""
    metric = metric or MetricModel.fs(s.m)
    if s.m not in (1, 2) or metric.m != s.m or getattr(psi, "m", 1) != s.m:
        raise ValueError("metric/dimension mismatch")
    if s.N == 0:
        raise ValueError("degree-0 sections have no zeros")
    base = exact_term(psi, metric)
    if psi.is_constant:
        return PairingEstimate(base, 0.0, 0)
    if rng is None:
        raise ValueError("pair_pl needs a random stream")
    W = sample_fs_points(s.m, n_mc, rng)
    logs = _log_norms(s.coeffs[:, None], s.m, s.N, W, metric)[:, 0]
    resampled = 0
    while True:
        bad = ~np.isfinite(logs)
        if not bad.any():
            break
        resampled += int(bad.sum())
        W[bad] = sample_fs_points(s.m, int(bad.sum()), rng)
        logs[bad] = _log_norms(s.coeffs[:, None], s.m, s.N, W[bad], metric)[:, 0]
    x = logs * psi.pl_density(W) / s.N
    est = PairingEstimate.from_samples(x, resampled)
    return PairingEstimate(base + est.value, est.std_error, est.n_samples, resampled)


# ---------------------------------------------------------------- CP^2 ----

def _eval_poly(coef, J, W):
    """Homogeneous polynomial ``sum coef_J w^J`` and its gradient at rows W."""
    P = np.prod(W[:, None, :] ** J[None], axis=2)
    val = P @ coef
    grad = np.empty((len(W), 3), dtype=complex)
    for a in range(3):
        Ja = J.copy()
        Ja[:, a] -= 1
        ok = J[:, a] > 0
        Pa = np.zeros_like(P)
        Pa[:, ok] = np.prod(W[:, None, :] ** np.maximum(Ja[ok], 0)[None], axis=2)
        grad[:, a] = Pa @ (coef * J[:, a])
    return val, grad


def _newton_polish(c1, c2, J, W, steps: int = 20):
    W = normalize_rows(W)
    for _ in range(steps):
        idx = np.argmax(np.abs(W), axis=1)
        W = W / W[np.arange(len(W)), idx][:, None]
        f1, g1 = _eval_poly(c1, J, W)
        f2, g2 = _eval_poly(c2, J, W)
        for i in range(len(W)):
            free = [a for a in range(3) if a != idx[i]]
            Jm = np.array([g1[i, free], g2[i, free]])
            try:
                d = np.linalg.solve(Jm, [f1[i], f2[i]])
            except np.linalg.LinAlgError:
                continue
            W[i, free] -= d
    return normalize_rows(W)


def _affine_coeffs(s: Section, U: np.ndarray) -> np.ndarray:
    """Coefficients ``A[i, j]`` of ``x^i y^j`` for ``s(U^H (1, x, y))``, by 2-D FFT."""
    N = s.N
    K = N + 1
    roots = np.exp(2j * np.pi * np.arange(K) / K)
    X, Y = np.meshgrid(roots, roots, indexing="ij")
    Wp = np.stack([np.ones(K * K), X.ravel(), Y.ravel()], axis=1)
    W = Wp @ np.conj(U)
    _, log_scale = _basis_tables(2, N)
    J = multi_indices(2, N)
    raw = s.coeffs * np.exp(log_scale)
    vals = (np.prod(W[:, None, :] ** J[None], axis=2) @ raw).reshape(K, K)
    return np.fft.fft2(vals) / (K * K)


def _sylvester_blocks(A1, A2):
    """Coefficient matrices ``S_k`` of the Sylvester matrix in y, as a polynomial in x."""
    N = A1.shape[0] - 1
    n = 2 * N
    S = np.zeros((N + 1, n, n), dtype=complex)
    for r in range(N):
        for j in range(N + 1):
            S[:, r, r + j] = A1[:, N - j]
            S[:, N + r, r + j] = A2[:, N - j]
    return S


def _sylvester_at(S, x):
    return sum(S[k] * x**k for k in range(len(S)))


def _solve_affine(A1, A2):
    N = A1.shape[0] - 1
    S = _sylvester_blocks(A1, A2)
    n = S.shape[1]
    rng = np.random.default_rng(12345)
    tests = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    ratios = []
    for x in tests:
        sv = np.linalg.svd(_sylvester_at(S, x), compute_uv=False)
        ratios.append(sv[-1] / sv[0])
    if max(ratios) < 1e-10:
        raise ValueError("degenerate pair")
    # companion linearization of sum_k S_k x^k
    D = n * N
    Acomp = np.zeros((D, D), dtype=complex)
    Bcomp = np.eye(D, dtype=complex)
    Acomp[:-n, n:] = np.eye(D - n)
    for k in range(N):
        Acomp[-n:, k * n:(k + 1) * n] = -S[k]
    Bcomp[-n:, -n:] = S[N]
    ab = linalg.eigvals(Acomp, Bcomp, homogeneous_eigvals=True)
    alpha, beta = ab
    scale = np.abs(alpha) + np.abs(beta)
    finite = np.abs(beta) > 1e-8 * scale
    xs = alpha[finite] / beta[finite]
    pts = []
    for x in xs:
        a1 = A1.T @ (x ** np.arange(N + 1))
        a2 = A2.T @ (x ** np.arange(N + 1))
        ys = np.roots(a1[::-1]) if np.abs(a1[-1]) > 0 else np.array([])
        if len(ys) == 0:
            continue
        r = np.abs(np.polyval(a2[::-1], ys)) / (1 + np.abs(ys)) ** N
        pts.append([1.0, x, ys[np.argmin(r)]])
    return np.array(pts, dtype=complex).reshape(-1, 3)


def _relative_residual(s: Section, W):
    return np.abs(basis_values(2, s.N, W) @ s.coeffs) / s.norm()


def common_zeros_cp2(s1: Section, s2: Section, rng: np.random.Generator | None = None,
                     attempts: int = 5) -> list[tuple[ProjectivePoint, int]]:
    """All N^2 common zeros of two generic sections of O(N) on CP^2 (N <= 8).

    A random unitary change of coordinates puts the pair in general position
    (no common zero on the line at infinity, distinct x-projections); the
    Sylvester resultant in y is solved as a generalized eigenproblem, y is
    recovered from the first section and all points are Newton-polished in
    the original coordinates.
    """
    if s1.m != 2 or s2.m != 2 or s1.N != s2.N:
        raise ValueError("need two sections of the same degree on CP^2")
    N = s1.N
    if N > 8:
        raise ValueError("common_zeros_cp2 supports N <= 8")
    if N == 0:
        return []
    rng = rng or np.random.default_rng(2024)
    J = multi_indices(2, N)
    _, log_scale = _basis_tables(2, N)
    c1 = s1.coeffs * np.exp(log_scale) / s1.norm()
    c2 = s2.coeffs * np.exp(log_scale) / s2.norm()
    best = None
    for _ in range(attempts):
        U = haar_unitary(3, rng)
        A1, A2 = _affine_coeffs(s1, U), _affine_coeffs(s2, U)
        P = _solve_affine(A1, A2)
        if len(P) == 0:
            continue
        W = _newton_polish(c1, c2, J, P @ np.conj(U))
        res = np.maximum(_relative_residual(s1, W), _relative_residual(s2, W))
        W = W[res <= RESIDUAL_TOL]
        if len(W) == 0:
            continue
        reps, counts = _cluster(W)
        if len(reps) == N * N:
            return [(ProjectivePoint(r), 1) for r in reps]
        best = best if best is not None and len(best) >= len(reps) else reps
    raise RuntimeError(f"found {0 if best is None else len(best)} of {N * N} common zeros")
