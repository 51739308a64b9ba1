"""Hermitian metrics on O(1) -> CP^m.

``MetricModel.fs(m)`` is the Fubini-Study metric.  ``MetricModel.perturbed(rho)``
(CP^1 only) is ``h = h_FS * exp(-rho)`` with ``rho`` a polynomial in the sphere
coordinates, so that pointwise norms pick up ``exp(-N rho / 2)`` on O(N) and
the curvature form becomes ``omega_FS + (i / 2 pi) dd-bar rho``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .finite_diff import chart_laplacian
from .projective import ChartPoint, cp1_quadrature, normalize_rows
from .testfunctions import SpherePolynomial

__all__ = ["MetricModel", "curvature_density"]

MAX_RHO_DEGREE = 4
MAX_RHO_COEFF = 0.5


@dataclass(frozen=True)
class MetricModel:
    kind: str = "FS"
    rho: SpherePolynomial | None = None
    m: int = 1

    def __post_init__(self):
        if self.kind not in ("FS", "Perturbed"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "FS":
            return
        if self.m != 1:
            raise ValueError("perturbed metrics are only supported on CP^1")
        if self.rho is None:
            raise ValueError("perturbed metric needs rho")
        if self.rho.degree > MAX_RHO_DEGREE:
            raise ValueError(f"rho must have degree <= {MAX_RHO_DEGREE}")
        if any(abs(c) > MAX_RHO_COEFF for _, c in self.rho.terms):
            raise ValueError(f"rho coefficients must be at most {MAX_RHO_COEFF} in modulus")
        grid = cp1_quadrature(64)
        if curvature_density(self, grid.z).min() <= 0:
            raise ValueError("curvature of the perturbed metric is not positive")

    @classmethod
    def fs(cls, m: int = 1) -> "MetricModel":
        return cls("FS", None, m)

    @classmethod
    def perturbed(cls, rho) -> "MetricModel":
        if isinstance(rho, str):
            rho = SpherePolynomial.parse(rho)
        return cls("Perturbed", rho, 1)

    @property
    def is_fs(self) -> bool:
        return self.kind == "FS"

    def rho_at(self, points) -> np.ndarray:
        """rho at unit homogeneous rows (zero for FS)."""
        points = np.atleast_2d(points)
        if self.is_fs:
            return np.zeros(len(points))
        return self.rho(points)

    def norm_sq_factor(self, points, N: int) -> np.ndarray:
        """Ratio ``||s||^2_{h_N} / ||s||^2_{FS}`` at the given points."""
        return np.exp(-N * self.rho_at(points))

    def volume_density(self, points) -> np.ndarray:
        """Density of the normalized volume dV = omega against dV_FS."""
        points = np.atleast_2d(points)
        if self.is_fs:
            return np.ones(len(points))
        W = normalize_rows(points)
        out = np.empty(len(W))
        north = np.abs(W[:, 0]) >= np.abs(W[:, 1])
        out[north] = curvature_density(self, W[north, 1] / W[north, 0])
        if np.any(~north):
            out[~north] = curvature_density(self, W[~north, 0] / W[~north, 1], chart=1)
        return out

    def to_json(self) -> dict:
        rho = [] if self.rho is None else self.rho.to_json()["terms"]
        return {"kind": self.kind, "rho": rho, "m": self.m}

    @classmethod
    def from_json(cls, data: dict) -> "MetricModel":
        if data.get("kind", "FS") == "FS":
            return cls.fs(int(data.get("m", 1)))
        rho = data["rho"]
        if isinstance(rho, str):
            return cls.perturbed(rho)
        terms = {(t["pow_u"], t["pow_v"], t["pow_w"]): t["coeff"] for t in rho}
        return cls.perturbed(SpherePolynomial(terms))


def _rho_in_chart(metric: MetricModel, chart: int):
    def f(z):
        z = np.asarray(z, dtype=complex)
        W = np.stack([np.ones_like(z), z], axis=-1) if chart == 0 else np.stack([z, np.ones_like(z)], axis=-1)
        return metric.rho(W.reshape(-1, 2)).reshape(z.shape)

    return f


def curvature_density(metric: MetricModel, p, chart: int = 0) -> np.ndarray | float:
    """Density of c_1(h) against dV_FS at a chart point (or array of chart-``chart`` coordinates).

    In a chart, (i / 2 pi) dd-bar rho = (1 / 4 pi) lap(rho) dx dy and
    dV_FS = (1 / pi) (1 + |z|^2)^-2 dx dy, so the density is
    1 + (1 + |z|^2)^2 lap(rho) / 4.  The Laplacian is a Richardson-extrapolated
    five-point stencil; points with |z| > 1 are moved to the other chart.
    """
    scalar = isinstance(p, ChartPoint)
    if scalar:
        if p.m != 1:
            raise ValueError("curvature_density is defined on CP^1")
        chart, z = p.chart_index, p.affine[0]
    z = np.atleast_1d(np.asarray(p if not scalar else z, dtype=complex))
    if metric.is_fs:
        out = np.ones(z.shape)
    else:
        far = np.abs(z) > 1.0
        zc = np.where(far, 1.0 / np.where(far, z, 1.0), z)
        out = np.empty(z.shape)
        for c, sel in ((chart, ~far), (1 - chart, far)):
            if np.any(sel):
                lap = chart_laplacian(_rho_in_chart(metric, c), zc[sel])
                out[sel] = 1.0 + (1.0 + np.abs(zc[sel]) ** 2) ** 2 * lap / 4.0
    return float(out[0]) if scalar else out
