import json
import math

import numpy as np
import pytest
from scipy import stats

from equizero.metric import MetricModel
from equizero.projective import ProjectivePoint, cp1_quadrature, normalize_point, sample_fs_points
from equizero.sections import (
    Section,
    basis_values,
    dim_h0,
    eval_norm,
    mass_integral,
    monomial_norm_sq,
    multi_indices,
    sample_gaussian,
    sample_haar_onb,
    sample_sphere,
    sum_squares,
)
from equizero.testfunctions import parse_test_function


def test_dim_h0():
    assert dim_h0(1, 5) == 6
    assert dim_h0(2, 2) == 6
    assert dim_h0(3, 0) == 1


def test_multi_index_order():
    J = multi_indices(2, 2)
    assert J.tolist() == [[2, 0, 0], [1, 1, 0], [1, 0, 1], [0, 2, 0], [0, 1, 1], [0, 0, 2]]
    assert np.all(J.sum(axis=1) == 2)


def test_monomial_norms():
    assert monomial_norm_sq(1, 2, (1, 1)) == pytest.approx(1 / 6)
    assert monomial_norm_sq(2, 2, (1, 1, 0)) == pytest.approx(1 / 12)
    assert monomial_norm_sq(1, 7, (7, 0)) == pytest.approx(1 / 8)
    with pytest.raises(ValueError):
        monomial_norm_sq(1, 3, (1, 1))
    # log-space stays finite far beyond factorial overflow
    assert 0 < monomial_norm_sq(1, 300, (150, 150)) < 1


def test_eval_norm_examples():
    for N in (1, 4, 9):
        s = Section(1, N, np.eye(N + 1)[0])
        assert eval_norm(s, normalize_point([1, 0])) == pytest.approx(math.sqrt(N + 1))
    s = Section.from_polynomial([-1, 0, 1])  # z^2 - 1
    assert eval_norm(s, normalize_point([1, 1])) == pytest.approx(0, abs=1e-14)
    s = Section(1, 5, np.eye(6)[0])
    assert mass_integral(s, parse_test_function("1")).value == pytest.approx(1, abs=1e-12)


def test_eval_norm_is_homogeneous(rng):
    s = sample_gaussian(1, 6, rng)
    p = ProjectivePoint(sample_fs_points(1, 1, rng)[0])
    c = 2.5 - 1.5j
    assert eval_norm(c * s, p) == pytest.approx(abs(c) * eval_norm(s, p), rel=1e-12)


def test_perturbed_norm_factor(rng):
    metric = MetricModel.perturbed("0.3*u")
    s = sample_gaussian(1, 8, rng)
    p = normalize_point([1, 0])  # u = 1
    assert eval_norm(s, p, metric) == pytest.approx(eval_norm(s, p) * math.exp(-8 * 0.3 / 2))
    with pytest.raises(ValueError):
        eval_norm(sample_gaussian(2, 2, rng), normalize_point([1, 0, 0]), metric)


@pytest.mark.parametrize("m,N", [(1, 0), (1, 5), (1, 40), (2, 2), (2, 17), (2, 40)])
def test_sum_squares_is_constant(m, N, rng):
    vals = sum_squares(m, N, sample_fs_points(m, 100, rng))
    assert np.allclose(vals, dim_h0(m, N), rtol=1e-9)


def test_gram_identity_cp1():
    for N in (0, 3, 10, 35):
        rule = cp1_quadrature(2 * N + 2)
        B = basis_values(1, N, rule.points)
        G = (B.T * rule.weights) @ B.conj()
        assert np.abs(G - np.eye(N + 1)).max() < 1e-8


def test_gram_identity_cp2_monte_carlo(rng):
    W = sample_fs_points(2, 100_000, rng)
    B = basis_values(2, 3, W)
    X = B[:, :, None] * B[:, None, :].conj()
    G, se = X.mean(axis=0), X.std(axis=0) / np.sqrt(len(W))
    assert np.all(np.abs(G - np.eye(B.shape[1])) <= 4 * se + 1e-12)


def test_section_json_round_trip(rng):
    s = sample_gaussian(2, 3, rng)
    t = Section.from_json(json.dumps(s.to_json()))
    assert t.m == 2 and t.N == 3 and np.array_equal(t.coeffs, s.coeffs)


def test_from_polynomial_and_monomials():
    s = Section.from_polynomial([2, 0, 3])
    assert np.allclose(s.monomial_coeffs(), [2, 0, 3])
    t = Section.from_monomials(1, 2, {(2, 0): 2, (0, 2): 3})
    assert np.allclose(s.coeffs, t.coeffs)
    with pytest.raises(ValueError):
        Section(1, 3, [1, 2])


def test_gaussian_moments(rng):
    n = 100_000
    A = np.array([sample_gaussian(1, 5, rng).coeffs for _ in range(n // 10)])
    sq = np.sum(np.abs(A) ** 2, axis=1)
    assert abs(sq.mean() - 6) < 3 * sq.std() / np.sqrt(len(sq))
    m = A[:, 0]
    assert abs(m.mean()) < 3 * m.std() / np.sqrt(len(m)) * np.sqrt(2)
    cov = A[:, 0] * A[:, 1].conj()
    assert abs(cov.mean()) < 3 * cov.std() / np.sqrt(len(cov)) * np.sqrt(2)


def test_sphere_model(rng):
    A = np.array([sample_sphere(1, 4, rng).coeffs for _ in range(20_000)])
    assert np.allclose(np.linalg.norm(A, axis=1), 1, atol=1e-12)
    x = np.abs(A[:, 2]) ** 2
    assert abs(x.mean() - 1 / 5) < 3 * x.std() / np.sqrt(len(x))
    phases = (np.angle(A[:, 0]) + np.pi) / (2 * np.pi)
    assert stats.kstest(phases, "uniform").pvalue > 0.01


def test_haar_onb(rng):
    onb = sample_haar_onb(1, 4, rng)
    U = onb.unitary
    assert np.linalg.norm(U.conj().T @ U - np.eye(5)) < 1e-10
    assert all(s.norm() == pytest.approx(1) for s in onb.sections())
    x = np.array([abs(sample_haar_onb(1, 1, rng).unitary[0, 0]) ** 4 for _ in range(20_000)])
    assert abs(x.mean() - 1 / 3) < 4 * x.std() / np.sqrt(len(x))


def test_mass_integral_closed_forms():
    u = parse_test_function("u")
    for n in (1, 5, 12):
        for j in range(n + 1):
            s = Section(1, n, np.eye(n + 1)[j])
            assert mass_integral(s, u).value == pytest.approx((n - 2 * j) / (n + 2), abs=1e-12)
    with pytest.raises(ValueError, match="rule too coarse"):
        mass_integral(Section(1, 5, np.eye(6)[0]), u, None, cp1_quadrature(6))


def test_mass_integral_sphere_average(rng):
    u = parse_test_function("u")
    vals = np.array([mass_integral(sample_sphere(1, 6, rng), u).value for _ in range(10_000)])
    assert abs(vals.mean()) < 3 * vals.std() / np.sqrt(len(vals))


def test_mass_integral_cp2_monte_carlo(rng):
    s = Section(2, 2, np.eye(6)[0])
    est = mass_integral(s, parse_test_function("1", 2), None, 100_000, rng)
    assert abs(est.value - 1) < 4 * est.std_error
    with pytest.raises(ValueError):
        mass_integral(s, parse_test_function("1", 2), None, 1000)


def test_unitary_invariance_of_sphere_model(rng):
    u = parse_test_function("u")
    U = sample_haar_onb(1, 5, rng).unitary
    a = np.array([mass_integral(sample_sphere(1, 5, rng), u).value for _ in range(4000)])
    b = np.array([mass_integral(Section(1, 5, U @ sample_sphere(1, 5, rng).coeffs), u).value for _ in range(4000)])
    se = np.sqrt(a.var() / len(a) + b.var() / len(b))
    assert abs(a.mean() - b.mean()) < 4 * se
    assert abs(a.var() - b.var()) < 4 * np.sqrt(2 / len(a)) * (a.var() + b.var())
