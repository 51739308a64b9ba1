"""Holomorphic sections of O(N) -> CP^m in the orthonormal monomial basis.

The reference basis is ``S_J = sqrt((N+m)! / (m! J!)) z^J`` for multi-indices
``|J| = N`` in descending lexicographic order, so on CP^1 coefficient ``k``
multiplies ``z^k = w_0^(N-k) w_1^k``.  Coefficients are stored against this
orthonormal basis, hence ``|s|^2 = sum |a_J|^2`` for the FS inner product.

The SU(m+1) convention ``P = sum a_J z^J / sqrt(J!)`` differs from ours by the
J-independent factor ``sqrt((N+m)! / m!)``, so both give the same zero sets.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .estimate import PairingEstimate
from .haar import complex_normal, haar_unitary
from .metric import MetricModel
from .projective import ProjectivePoint, QuadratureRule, cp1_quadrature, sample_fs_points

__all__ = [
    "Section",
    "OrthonormalBasisSample",
    "multi_indices",
    "dim_h0",
    "monomial_norm_sq",
    "basis_values",
    "eval_norm",
    "section_norms",
    "sum_squares",
    "sample_gaussian",
    "sample_sphere",
    "sample_haar_onb",
    "mass_integral",
    "column_masses",
]


def dim_h0(m: int, N: int) -> int:
    if N < 0:
        raise ValueError("degree must be nonnegative")
    return math.comb(N + m, m)


@lru_cache(maxsize=None)
def _multi_indices(m: int, N: int) -> tuple[tuple[int, ...], ...]:
    if m == 0:
        return ((N,),)
    return tuple((j0,) + rest for j0 in range(N, -1, -1) for rest in _multi_indices(m - 1, N - j0))


def multi_indices(m: int, N: int) -> np.ndarray:
    """All J with |J| = N as a ``(d_N, m+1)`` int array, descending lexicographic."""
    return np.array(_multi_indices(m, N), dtype=int)


def _log_norm_sq(m: int, J) -> np.ndarray:
    J = np.atleast_2d(J)
    N = J[0].sum()
    return gammaln(m + 1) + gammaln(J + 1).sum(axis=1) - gammaln(N + m + 1)


def monomial_norm_sq(m: int, N: int, J) -> float:
    """Squared L^2 norm of ``z^J``: m! j_0! ... j_m! / (N+m)!."""
    J = np.asarray(J, dtype=int)
    if len(J) != m + 1 or np.any(J < 0):
        raise ValueError("multi-index has the wrong length or a negative entry")
    if J.sum() != N:
        raise ValueError(f"multi-index {tuple(J)} does not have degree {N}")
    return float(np.exp(_log_norm_sq(m, J)[0]))


@lru_cache(maxsize=None)
def _basis_tables(m: int, N: int):
    J = multi_indices(m, N)
    return J, -0.5 * _log_norm_sq(m, J)


def basis_values(m: int, N: int, points) -> np.ndarray:
    """``S_J(w)`` at unit homogeneous rows ``w``, shape ``(n, d_N)``.

    Since the rows are unit vectors, ``|S_J(w)| = ||S_J([w])||_FS``.
    Computed in log space so the large binomial prefactors never overflow.
    """
    W = np.atleast_2d(np.asarray(points, dtype=complex))
    J, log_scale = _basis_tables(m, N)
    with np.errstate(divide="ignore", invalid="ignore"):
        logW = np.log(W)
    logs = np.broadcast_to(log_scale, (len(W), len(J))).astype(complex)
    with np.errstate(invalid="ignore"):
        for a in range(m + 1):
            e = J[:, a]
            logs = logs + np.where(e[None, :] == 0, 0.0, e[None, :] * logW[:, a, None])
    return np.exp(logs)


@dataclass(frozen=True, eq=False)
class Section:
    m: int
    N: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if len(c) != dim_h0(self.m, self.N):
            raise ValueError(f"expected {dim_h0(self.m, self.N)} coefficients, got {len(c)}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_polynomial(cls, coeffs, N: int | None = None) -> "Section":
        """CP^1 section from ``p(z) = sum_k coeffs[k] z^k`` viewed in degree N."""
        b = np.asarray(coeffs, dtype=complex)
        N = len(b) - 1 if N is None else N
        if len(b) > N + 1:
            raise ValueError("polynomial degree exceeds N")
        b = np.concatenate([b, np.zeros(N + 1 - len(b))])
        J, log_scale = _basis_tables(1, N)
        return cls(1, N, b * np.exp(-log_scale))

    @classmethod
    def from_monomials(cls, m: int, N: int, monomials: dict) -> "Section":
        """Section from raw monomial coefficients ``{J: c}`` of a homogeneous polynomial."""
        J, log_scale = _basis_tables(m, N)
        lookup = {tuple(j): i for i, j in enumerate(J)}
        a = np.zeros(len(J), dtype=complex)
        for key, c in monomials.items():
            key = tuple(int(x) for x in key)
            if key not in lookup:
                raise ValueError(f"monomial {key} is not of degree {N} in {m + 1} variables")
            a[lookup[key]] += c * np.exp(-log_scale[lookup[key]])
        return cls(m, N, a)

    @property
    def dim(self) -> int:
        return len(self.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def monomial_coeffs(self) -> np.ndarray:
        """Raw coefficients of z^J (large for big N; prefer the ONB coefficients)."""
        _, log_scale = _basis_tables(self.m, self.N)
        return self.coeffs * np.exp(log_scale)

    def __mul__(self, c) -> "Section":
        return Section(self.m, self.N, self.coeffs * c)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {"m": self.m, "N": self.N, "coeffs": [[z.real, z.imag] for z in self.coeffs]}

    @classmethod
    def from_json(cls, data) -> "Section":
        if isinstance(data, str):
            data = json.loads(data)
        coeffs = [complex(re, im) for re, im in data["coeffs"]]
        return cls(int(data["m"]), int(data["N"]), coeffs)


@dataclass(frozen=True, eq=False)
class OrthonormalBasisSample:
    m: int
    N: int
    unitary: np.ndarray

    def sections(self) -> list[Section]:
        return [Section(self.m, self.N, col) for col in self.unitary.T]


def _points_array(p):
    if isinstance(p, ProjectivePoint):
        return p.homogeneous[None, :]
    return np.atleast_2d(np.asarray(p, dtype=complex))


def section_norms(s: Section, points, metric: MetricModel | None = None) -> np.ndarray:
    """``||s(p)||_{h_N}`` at unit homogeneous rows."""
    W = _points_array(points)
    W = W / np.linalg.norm(W, axis=1)[:, None]
    metric = metric or MetricModel.fs(s.m)
    if metric.m != s.m:
        raise ValueError("metric/dimension mismatch")
    vals = np.abs(basis_values(s.m, s.N, W) @ s.coeffs)
    if not metric.is_fs:
        vals = vals * np.exp(-0.5 * s.N * metric.rho_at(W))
    return vals


def eval_norm(s: Section, p, metric: MetricModel | None = None) -> float:
    return float(section_norms(s, p, metric)[0])


def sum_squares(m: int, N: int, p) -> float | np.ndarray:
    """``sum_J ||S_J(p)||^2`` for the FS metric (identically d_N)."""
    W = _points_array(p)
    W = W / np.linalg.norm(W, axis=1)[:, None]
    out = np.sum(np.abs(basis_values(m, N, W)) ** 2, axis=1)
    return float(out[0]) if isinstance(p, ProjectivePoint) else out


def sample_gaussian(m: int, N: int, rng: np.random.Generator) -> Section:
    return Section(m, N, complex_normal(dim_h0(m, N), rng))


def sample_sphere(m: int, N: int, rng: np.random.Generator) -> Section:
    a = complex_normal(dim_h0(m, N), rng)
    return Section(m, N, a / np.linalg.norm(a))


def sample_haar_onb(m: int, N: int, rng: np.random.Generator) -> OrthonormalBasisSample:
    return OrthonormalBasisSample(m, N, haar_unitary(dim_h0(m, N), rng))


def column_masses(C: np.ndarray, m: int, N: int, psi, metric: MetricModel, rule: QuadratureRule) -> np.ndarray:
    """``int psi ||s||^2_{h_N} dV`` for every column of the coefficient matrix ``C`` (CP^1)."""
    W = rule.points
    weights = rule.weights * metric.volume_density(W) * metric.norm_sq_factor(W, N) * psi(W)
    vals = basis_values(m, N, W) @ C
    return weights @ (np.abs(vals) ** 2)


def mass_integral(s: Section, psi, metric: MetricModel | None = None, rule_or_samples=None,
                  rng: np.random.Generator | None = None) -> PairingEstimate:
    """``int psi ||s||^2_{h_N} dV`` by quadrature (m = 1) or Monte Carlo (m >= 2).

    For m = 1 pass a :class:`QuadratureRule` (default: degree 2N + deg psi);
    for m >= 2 pass a sample count (default 10^5) and a random stream, or an
    explicit array of FS-uniform points.
    """
    metric = metric or MetricModel.fs(s.m)
    if s.m == 1:
        rule = rule_or_samples if rule_or_samples is not None else _default_rule(s.N, psi)
        if not isinstance(rule, QuadratureRule):
            raise TypeError("CP^1 mass integrals need a QuadratureRule")
        if rule.degree < 2 * s.N + psi.degree:
            raise ValueError("rule too coarse")
        val = column_masses(s.coeffs[:, None], 1, s.N, psi, metric, rule)[0]
        return PairingEstimate(float(val), 0.0, len(rule.weights))
    if not metric.is_fs or metric.m != s.m:
        raise ValueError("metric/dimension mismatch")
    if rule_or_samples is None or np.isscalar(rule_or_samples):
        n = int(rule_or_samples or 100_000)
        if rng is None:
            raise ValueError("Monte-Carlo mass integrals need a random stream")
        W = sample_fs_points(s.m, n, rng)
    else:
        W = np.asarray(rule_or_samples)
    x = psi(W) * np.abs(basis_values(s.m, s.N, W) @ s.coeffs) ** 2
    return PairingEstimate.from_samples(x)


def _default_rule(N: int, psi) -> QuadratureRule:
    return cp1_quadrature(2 * N + psi.degree)
