"""Points, charts, volume forms, sampling and quadrature on CP^m.

Points are stored as unit vectors in C^{m+1} in a canonical gauge: the first
coordinate of largest modulus is real and nonnegative.  Most routines also
accept stacks of such vectors with shape ``(n, m+1)``.

On CP^1 the affine coordinate of chart 0 is ``z = w1 / w0`` and the sphere
coordinates are

    u = (1 - |z|^2) / (1 + |z|^2),  v = 2 Re z / (1 + |z|^2),  w = 2 Im z / (1 + |z|^2),

so ``[1:0]`` is the north pole ``u = 1`` and ``[0:1]`` the south pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProjectivePoint",
    "ChartPoint",
    "QuadratureRule",
    "normalize_point",
    "normalize_rows",
    "fs_volume_density",
    "sample_fs_uniform",
    "sample_fs_points",
    "sphere_coords",
    "sphere_coords_rows",
    "cp1_quadrature",
    "cp2_quadrature",
    "chordal_distance",
]


def normalize_rows(W):
    """Canonical-gauge unit representatives for a stack of nonzero vectors."""
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    norms = np.linalg.norm(W, axis=1)
    if np.any(norms == 0):
        raise ValueError("not a projective point")
    W = W / norms[:, None]
    mag = np.abs(W)
    # near-ties go to the lowest index so the gauge is stable under rounding
    idx = np.argmax(mag >= mag.max(axis=1, keepdims=True) * (1 - 1e-12), axis=1)
    lead = W[np.arange(len(W)), idx]
    phase = np.conj(lead) / np.abs(lead)
    W = W * phase[:, None]
    W[np.arange(len(W)), idx] = np.abs(lead)
    return W


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """A point of CP^m given by its canonical unit representative."""

    homogeneous: np.ndarray

    def __post_init__(self):
        w = np.array(self.homogeneous, dtype=complex)
        w.setflags(write=False)
        object.__setattr__(self, "homogeneous", w)

    @property
    def m(self) -> int:
        return len(self.homogeneous) - 1

    def chart(self, index: int | None = None) -> "ChartPoint":
        """Affine coordinates in chart ``index`` (default: max-modulus chart)."""
        w = self.homogeneous
        if index is None:
            index = int(np.argmax(np.abs(w)))
        if w[index] == 0:
            raise ValueError(f"point lies outside chart {index}")
        affine = np.delete(w, index) / w[index]
        return ChartPoint(affine, index)

    def distance(self, other: "ProjectivePoint") -> float:
        """Chordal distance sqrt(1 - |<x, y>|^2)."""
        return float(chordal_distance(self.homogeneous, other.homogeneous))

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return self.m == other.m and self.distance(other) < 1e-12

    def __repr__(self):
        coords = ", ".join(f"{c:.6g}" for c in self.homogeneous)
        return f"ProjectivePoint([{coords}])"


@dataclass(frozen=True, eq=False)
class ChartPoint:
    """Affine coordinates ``affine`` in the chart where coordinate ``chart_index`` is 1."""

    affine: np.ndarray
    chart_index: int = 0

    def __post_init__(self):
        a = np.atleast_1d(np.array(self.affine, dtype=complex))
        a.setflags(write=False)
        object.__setattr__(self, "affine", a)
        if not 0 <= self.chart_index <= len(a):
            raise ValueError("chart index out of range")

    @property
    def m(self) -> int:
        return len(self.affine)

    def to_projective(self) -> ProjectivePoint:
        w = np.insert(self.affine, self.chart_index, 1.0)
        return normalize_point(w)


def normalize_point(w) -> ProjectivePoint:
    """Return the canonical-gauge unit representative of ``[w]``."""
    w = np.asarray(w, dtype=complex)
    if w.ndim != 1 or len(w) < 2:
        raise ValueError("homogeneous vector must have at least two entries")
    return ProjectivePoint(normalize_rows(w[None, :])[0])


def fs_volume_density(m: int, p) -> float | np.ndarray:
    """Density of the unit-mass Fubini-Study volume against Lebesgue measure in a chart.

    ``p`` is a ChartPoint, or an array of affine coordinates: any shape of
    complex ``z`` when m = 1, trailing axis of length m otherwise.
    """
    if isinstance(p, ChartPoint):
        r2 = float(np.sum(np.abs(p.affine) ** 2))
    elif m == 1:
        r2 = np.abs(np.asarray(p, dtype=complex)) ** 2
    else:
        r2 = np.sum(np.abs(np.asarray(p, dtype=complex)) ** 2, axis=-1)
    return math.factorial(m) / math.pi**m * (1.0 + r2) ** (-(m + 1))


def sample_fs_points(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` FS-uniform points of CP^m as an ``(n, m+1)`` array of unit vectors."""
    g = rng.standard_normal((n, m + 1, 2))
    return normalize_rows(g[..., 0] + 1j * g[..., 1])


def sample_fs_uniform(m: int, rng: np.random.Generator) -> ProjectivePoint:
    return ProjectivePoint(sample_fs_points(m, 1, rng)[0])


def sphere_coords_rows(W) -> np.ndarray:
    """Sphere coordinates ``(u, v, w)`` of a stack of CP^1 points, shape ``(n, 3)``."""
    W = np.atleast_2d(np.asarray(W, dtype=complex))
    if W.shape[1] != 2:
        raise ValueError("sphere coordinates need m = 1")
    norm2 = np.sum(np.abs(W) ** 2, axis=1)
    a, b = W[:, 0], W[:, 1]
    cross = np.conj(a) * b
    u = (np.abs(a) ** 2 - np.abs(b) ** 2) / norm2
    return np.stack([u, 2 * cross.real / norm2, 2 * cross.imag / norm2], axis=1)


def sphere_coords(p: ProjectivePoint) -> tuple[float, float, float]:
    if p.m != 1:
        raise ValueError("sphere coordinates need m = 1")
    u, v, w = sphere_coords_rows(p.homogeneous[None, :])[0]
    return float(u), float(v), float(w)


def chordal_distance(x, y):
    """sqrt(1 - |<x, y>|^2) for unit vectors (broadcasts over leading axes).

    Evaluated as the norm of the wedge ``x ^ y``, which keeps full relative
    accuracy for nearby points (the overlap form loses half the digits).
    """
    x = np.asarray(x)
    y = np.asarray(y)
    n = x.shape[-1]
    total = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            total = total + np.abs(x[..., a] * y[..., b] - x[..., b] * y[..., a]) ** 2
    return np.sqrt(total)


@dataclass(frozen=True)
class QuadratureRule:
    """Product rule on CP^1 for the unit-mass FS volume.

    Nodes all lie in chart 0 (the Gauss-Legendre latitudes never reach the
    south pole).  ``degree`` is the total degree in the sphere coordinates
    up to which the rule is exact.
    """

    z: np.ndarray
    weights: np.ndarray
    degree: int
    u: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)

    @property
    def nodes(self) -> list[ChartPoint]:
        return [ChartPoint([zz], 0) for zz in self.z]

    @property
    def points(self) -> np.ndarray:
        """Unit homogeneous representatives of the nodes, shape ``(n, 2)``."""
        W = np.stack([np.ones_like(self.z), self.z], axis=1)
        return W / np.linalg.norm(W, axis=1)[:, None]

    @property
    def sphere(self) -> np.ndarray:
        s = np.sqrt(1.0 - self.u**2)
        return np.stack([self.u, s * np.cos(self.phi), s * np.sin(self.phi)], axis=1)

    def integrate(self, values) -> float | np.ndarray:
        """Sum ``weights * values`` over the trailing node axis."""
        return np.asarray(values) @ self.weights


def cp1_quadrature(degree: int) -> QuadratureRule:
    """Gauss-Legendre in ``u`` times trapezoid in longitude, ``degree + 2`` nodes per axis."""
    if degree < 1:
        raise ValueError("degree must be positive")
    n = degree + 2
    x, wx = np.polynomial.legendre.leggauss(n)
    phi = 2.0 * np.pi * np.arange(n) / n
    U, PHI = np.meshgrid(x, phi, indexing="ij")
    W = np.outer(wx / 2.0, np.full(n, 1.0 / n))
    radius = np.sqrt((1.0 - U) / (1.0 + U))
    z = radius * np.exp(1j * PHI)
    return QuadratureRule(z.ravel(), W.ravel(), degree, U.ravel(), PHI.ravel())


def cp2_quadrature(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes ``(n, 3)`` and weights for the unit-mass FS volume on CP^2.

    Uses ``|w_a|^2`` uniform on the simplex (collapsed Gauss-Legendre) times
    a trapezoid rule in the two relative phases.  Exact for polynomials of
    total degree <= ``degree`` in the moment coordinates.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    n = degree // 2 + 2
    x, wx = np.polynomial.legendre.leggauss(n)
    x, wx = (x + 1.0) / 2.0, wx / 2.0
    k = degree + 1
    theta = 2.0 * np.pi * np.arange(k) / k
    A, Bv, T1, T2 = np.meshgrid(x, x, theta, theta, indexing="ij")
    WA, WB = np.meshgrid(wx, wx, indexing="ij")
    w = (2.0 * (1.0 - A[..., 0, 0]) * WA * WB)[..., None, None] * np.full((k, k), 1.0 / k**2)
    t0, t1 = A, (1.0 - A) * Bv
    t2 = 1.0 - t0 - t1
    W = np.stack([np.sqrt(t0) + 0j, np.sqrt(t1) * np.exp(1j * T1), np.sqrt(np.clip(t2, 0, None)) * np.exp(1j * T2)], axis=-1)
    return W.reshape(-1, 3), w.ravel()
