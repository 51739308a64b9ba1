"""Toeplitz matrices on H^0(CP^1, O(N)) and the Haar-orbit statistics behind them.

``T[j, k] = <psi e_k, e_j>`` for an orthonormal basis ``e`` of the metric
(the reference monomials for FS, the Bergman basis otherwise).  Averages
over Haar unitaries of the diagonal of ``U* T U`` are exact at finite d:

    E || diag(U* D U) - mean(lambda) ||^2 = S_2 / (d + 1) - S_1^2 / (d (d + 1)).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bergman import bergman_basis
from .estimate import PairingEstimate
from .haar import complex_normal, haar_unitary
from .metric import MetricModel
from .projective import QuadratureRule, cp1_quadrature
from .sections import basis_values

__all__ = [
    "ToeplitzMatrix",
    "SpectrumSummary",
    "toeplitz_build",
    "szego_trace",
    "haar_unitary",
    "orbit_functional",
    "orbit_closed_form",
    "orbit_functional_batch",
    "sphere_moment4",
    "y_statistic",
    "y_statistic_batch",
    "gn_value",
    "gn_spread",
    "log_gaussian_second_moment",
]


@dataclass(frozen=True, eq=False)
class ToeplitzMatrix:
    N: int
    psi: object
    entries: np.ndarray
    asymmetry: float = 0.0

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    def spectrum(self) -> "SpectrumSummary":
        return SpectrumSummary.from_eigenvalues(np.linalg.eigvalsh(self.entries))

    def to_json(self) -> list:
        """Row-major flat list of ``[re, im]`` pairs."""
        return [[float(z.real), float(z.imag)] for z in self.entries.ravel()]

    @classmethod
    def from_json(cls, data, N: int, psi=None) -> "ToeplitzMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        d = N + 1
        T = np.array([complex(a, b) for a, b in data]).reshape(d, d)
        return cls(N, psi, T)


@dataclass(frozen=True)
class SpectrumSummary:
    eigenvalues: np.ndarray
    power_sums: dict

    @classmethod
    def from_eigenvalues(cls, lam, kmax: int = 6) -> "SpectrumSummary":
        lam = np.sort(np.asarray(lam, dtype=float))
        return cls(lam, {k: float(np.sum(lam**k)) for k in range(1, kmax + 1)})


def toeplitz_build(psi, N: int, metric: MetricModel | None = None,
                   rule: QuadratureRule | None = None) -> ToeplitzMatrix:
    """Compress multiplication by ``psi`` to H^0(O(N)) by quadrature."""
    metric = metric or MetricModel.fs(1)
    if metric.m != 1:
        raise ValueError("Toeplitz matrices are built on CP^1")
    if rule is None:
        extra = 0 if metric.is_fs else 48 + 2 * int(np.ceil(N * sum(abs(c) for _, c in metric.rho.terms)))
        rule = cp1_quadrature(2 * N + psi.degree + extra)
    if rule.degree < 2 * N + psi.degree:
        raise ValueError("rule too coarse")
    W = rule.points
    E = basis_values(1, N, W)
    if not metric.is_fs:
        E = E @ bergman_basis(metric, N).coefficients
    w = rule.weights * metric.volume_density(W) * metric.norm_sq_factor(W, N) * psi(W)
    T = (E.T * w) @ np.conj(E)
    T = T.T  # T[j, k] = sum w e_k conj(e_j)
    asym = float(np.abs(T - T.conj().T).max())
    return ToeplitzMatrix(N, psi, 0.5 * (T + T.conj().T), asym)


def szego_trace(T: ToeplitzMatrix, k: int) -> float:
    """``(1/d) Tr T^k``."""
    if not 1 <= k <= 6:
        raise ValueError("k must be between 1 and 6")
    return float(np.sum(np.linalg.eigvalsh(T.entries) ** k) / T.d)


def orbit_functional(U: np.ndarray, lam) -> float:
    """``|| diag(U* D(lam) U) - mean(lam) ||^2``."""
    lam = np.asarray(lam, dtype=float)
    U = np.asarray(U)
    if U.shape != (len(lam), len(lam)):
        raise ValueError("dimension mismatch")
    diag = np.sum(np.abs(U) ** 2 * lam[:, None], axis=0)
    return float(np.sum((diag - lam.mean()) ** 2))


def orbit_closed_form(lam, d: int | None = None) -> float:
    lam = np.asarray(lam, dtype=float)
    d = len(lam) if d is None else d
    if d < 1 or len(lam) != d:
        raise ValueError("dimension mismatch")
    s1, s2 = lam.sum(), np.sum(lam**2)
    return float(max(s2 / (d + 1) - s1**2 / (d * (d + 1)), 0.0))


def sphere_moment4(d: int, trials: int, rng: np.random.Generator) -> PairingEstimate:
    """Monte Carlo ``E |a_1|^4`` for ``a`` uniform on the unit sphere of C^d."""
    if d < 1:
        raise ValueError("d must be positive")
    a = complex_normal((trials, d), rng)
    x = np.abs(a[:, 0]) ** 4 / np.sum(np.abs(a) ** 2, axis=1) ** 2
    return PairingEstimate.from_samples(x)


def y_statistic(U: np.ndarray, T: ToeplitzMatrix) -> float:
    """``sum_j |(U* T U)_jj - Tr T / d|^2``."""
    A = T.entries
    diag = np.real(np.einsum("ij,ik,kj->j", np.conj(U), A, U))
    return float(np.sum((diag - np.trace(A).real / T.d) ** 2))


def orbit_functional_batch(lam, trials: int, rng: np.random.Generator, block: int = 256) -> np.ndarray:
    """``orbit_functional(U, lam)`` for ``trials`` independent Haar unitaries."""
    lam = np.asarray(lam, dtype=float)
    out = np.empty(trials)
    for start in range(0, trials, block):
        n = min(block, trials - start)
        U = haar_unitary(len(lam), rng, size=n)
        diag = np.einsum("bij,i->bj", np.abs(U) ** 2, lam)
        out[start:start + n] = np.sum((diag - lam.mean()) ** 2, axis=1)
    return out


def y_statistic_batch(T: ToeplitzMatrix, trials: int, rng: np.random.Generator,
                      block: int = 256) -> np.ndarray:
    """Y for ``trials`` independent Haar unitaries, computed in the eigenbasis of T.

    Haar measure is invariant under the eigenvector rotation, so only the
    spectrum enters.
    """
    return orbit_functional_batch(np.linalg.eigvalsh(T.entries), trials, rng, block)


def _random_sphere(d, n, rng):
    a = complex_normal((n, d), rng)
    return a / np.linalg.norm(a, axis=1, keepdims=True)


def gn_value(x: np.ndarray, y: np.ndarray, trials: int, rng: np.random.Generator) -> PairingEstimate:
    """Monte Carlo ``E[log|<x,a>| log|<y,a>|]`` for ``a`` uniform on the sphere."""
    a = _random_sphere(len(x), trials, rng)
    lx = np.log(np.abs(a @ np.conj(x)))
    ly = np.log(np.abs(a @ np.conj(y)))
    return PairingEstimate.from_samples(lx * ly)


def gn_spread(d: int, trials_outer: int, trials_inner: int, rng: np.random.Generator) -> dict:
    """Spread (max - min) of ``G(x, y)`` over random pairs of unit vectors in C^d.

    Returns the spread, the largest standard error among the pairs and a flag
    raised when the inner standard error is not small against the spread.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    vals, errs = [], []
    for _ in range(trials_outer):
        x, y = _random_sphere(d, 2, rng)
        est = gn_value(x, y, trials_inner, rng)
        vals.append(est.value)
        errs.append(est.std_error if np.isfinite(est.std_error) else np.inf)
    spread = float(np.max(vals) - np.min(vals))
    err = float(np.max(errs))
    return {"spread": spread, "max_std_error": err, "values": vals,
            "noise_dominated": bool(not np.isfinite(err) or err >= spread)}


def log_gaussian_second_moment() -> float:
    """``E[(log|g|)^2]`` for a standard complex Gaussian g: gamma^2/4 + pi^2/24."""
    return float(np.euler_gamma**2 / 4 + np.pi**2 / 24)
