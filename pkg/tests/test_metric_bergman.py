import json

import numpy as np
import pytest

from equizero.bergman import bergman_basis, bergman_density, gram_matrix, kodaira_pullback_density
from equizero.metric import MetricModel, curvature_density
from equizero.projective import ChartPoint, cp1_quadrature, normalize_point, sample_fs_points
from equizero.sections import basis_values

RHO = MetricModel.perturbed("0.3*u")


def test_metric_validation():
    with pytest.raises(ValueError):
        MetricModel.perturbed("0.6*u")
    with pytest.raises(ValueError):
        MetricModel.perturbed("0.1*u**5")
    with pytest.raises(ValueError):
        MetricModel("Perturbed", None)
    with pytest.raises(ValueError):
        MetricModel("Other")


def test_metric_json_round_trip():
    data = json.loads(json.dumps(RHO.to_json()))
    assert data["kind"] == "Perturbed"
    assert data["rho"] == [{"pow_u": 1, "pow_v": 0, "pow_w": 0, "coeff": 0.3}]
    back = MetricModel.from_json(data)
    W = np.array([[0.6, 0.8]])
    assert back.rho_at(W) == pytest.approx(RHO.rho_at(W))
    assert MetricModel.from_json({"kind": "FS"}).is_fs


def test_curvature_density_values(rng):
    assert curvature_density(MetricModel.fs(), ChartPoint([0.3])) == 1.0
    W = sample_fs_points(1, 50, rng)
    u = (np.abs(W[:, 0]) ** 2 - np.abs(W[:, 1]) ** 2)
    # Laplacian of u on the unit sphere is -2u, so kappa = 1 - 0.6 u
    assert np.allclose(RHO.volume_density(W), 1 - 0.6 * u, atol=1e-8)
    far = curvature_density(RHO, ChartPoint([1e7]))
    assert far == pytest.approx(1.6, abs=1e-6)


def test_curvature_unit_mass():
    for rho in ("0.3*u", "0.2*u**2 + 0.1*v*w - 0.1*w**3"):
        metric = MetricModel.perturbed(rho)
        rule = cp1_quadrature(24)
        assert rule.integrate(metric.volume_density(rule.points)) == pytest.approx(1, abs=1e-6)


def test_curvature_against_direct_second_differences():
    f = lambda z: 0.3 * (1 - abs(z) ** 2) / (1 + abs(z) ** 2)
    for h in (1e-2, 1e-3):
        lap = (f(h) + f(-h) + f(1j * h) + f(-1j * h) - 4 * f(0)) / h**2
        assert 1 + lap / 4 == pytest.approx(curvature_density(RHO, ChartPoint([0])), abs=2 * h**2)


def test_gram_matrix_properties():
    G = gram_matrix(MetricModel.fs(), 10)
    assert np.abs(G - np.eye(11)).max() < 1e-10
    G = gram_matrix(RHO, 12)
    assert np.abs(G - np.diag(np.diag(G))).max() < 1e-10 * np.abs(G).max()
    assert np.abs(G - G.conj().T).max() < 1e-12
    with pytest.raises(ValueError, match="rule too coarse"):
        gram_matrix(RHO, 12, cp1_quadrature(10))


def test_gram_condition_error():
    # dropping most nodes keeps the degree label but loses rank
    from equizero.projective import QuadratureRule

    rule = cp1_quadrature(120)
    keep = slice(0, 30)
    bad = QuadratureRule(rule.z[keep], rule.weights[keep], rule.degree, rule.u[keep], rule.phi[keep])
    with pytest.raises(ValueError, match="increase quadrature degree or reduce N"):
        gram_matrix(MetricModel.perturbed("0.5*u"), 60, bad)


def test_bergman_basis():
    fs = bergman_basis(MetricModel.fs(), 6)
    assert np.array_equal(fs.transform, np.eye(7))
    b = bergman_basis(RHO, 20)
    T = b.transform
    assert np.allclose(T, np.tril(T))
    assert np.prod(np.diag(T)).real > 0 and abs(np.prod(np.diag(T)).imag) < 1e-12
    rule = cp1_quadrature(2 * 20 + 120)
    E = basis_values(1, 20, rule.points) @ b.coefficients
    w = rule.weights * RHO.volume_density(rule.points) * RHO.norm_sq_factor(rule.points, 20)
    assert np.abs((E.T * w) @ E.conj() - np.eye(21)).max() < 1e-8


def test_bergman_density(rng):
    fs = bergman_basis(MetricModel.fs(), 5)
    assert np.allclose(bergman_density(fs, sample_fs_points(1, 30, rng)), 6)
    b = bergman_basis(RHO, 24)
    rule = cp1_quadrature(2 * 24 + 100)
    total = rule.integrate(bergman_density(b, rule.points) * RHO.volume_density(rule.points))
    assert total == pytest.approx(25, abs=1e-6)
    assert bergman_density(b, normalize_point([1, 2])) > 0


def test_kodaira_density(rng):
    W = sample_fs_points(1, 40, rng)
    for N in (3, 16):
        assert np.abs(kodaira_pullback_density(bergman_basis(MetricModel.fs(), N), N, W) - 1).max() < 5e-6
    b = bergman_basis(RHO, 16)
    rule = cp1_quadrature(40)
    assert rule.integrate(kodaira_pullback_density(b, 16, rule.points)) == pytest.approx(1, abs=1e-5)
    assert np.all(kodaira_pullback_density(b, 16, W) > 0)
    with pytest.raises(ValueError):
        kodaira_pullback_density(b, 17, W)
