import numpy as np
import pytest

from equizero.finite_diff import chart_laplacian, complex_hessian
from equizero.projective import cp1_quadrature, sample_fs_points, sphere_coords_rows
from equizero.testfunctions import MomentPolynomial, SpherePolynomial, parse_test_function


def test_parse_and_evaluate(rng):
    psi = parse_test_function("u**2 - 1/3 + 0.5*v*w")
    W = sample_fs_points(1, 50, rng)
    X = sphere_coords_rows(W)
    assert np.allclose(psi(W), X[:, 0] ** 2 - 1 / 3 + 0.5 * X[:, 1] * X[:, 2])
    assert psi.degree == 2 and not psi.is_constant
    assert parse_test_function("1").is_constant


def test_rejects_unknown_symbols():
    with pytest.raises(ValueError):
        SpherePolynomial.parse("u + q")


def test_sphere_laplacian_of_harmonics(rng):
    W = sample_fs_points(1, 40, rng)
    X = sphere_coords_rows(W)
    # spherical harmonics of degree l have eigenvalue -l(l+1)
    for expr, l in (("u", 1), ("v*w", 2), ("u**2 - 1/3", 2), ("5*u**3 - 3*u", 3)):
        psi = SpherePolynomial.parse(expr)
        assert np.allclose(psi.sphere_laplacian(X), -l * (l + 1) * psi(W), atol=1e-10)
        assert np.allclose(psi.pl_density(W), -2 * l * (l + 1) * psi(W), atol=1e-10)


def test_pl_density_integrates_to_zero():
    rule = cp1_quadrature(12)
    psi = parse_test_function("u**3 + 0.2*v**2 - w")
    assert abs(rule.integrate(psi.pl_density(rule.points))) < 1e-12


def test_moment_polynomial_cp1_matches_sphere(rng):
    W = sample_fs_points(1, 30, rng)
    x00 = MomentPolynomial.parse(1, "x00")
    u = SpherePolynomial.parse("u")
    assert np.allclose(2 * x00(W) - 1, u(W))
    assert np.allclose(x00.pl_density(W), -4 * (x00(W) - 0.5), atol=1e-6)


def test_moment_polynomial_cp2(rng):
    W = sample_fs_points(2, 30, rng)
    psi = parse_test_function("x11", 2)
    assert isinstance(psi, MomentPolynomial)
    assert np.allclose(psi.pl_density(W), -3 * (psi(W) - 1 / 3), atol=1e-6)
    assert np.allclose(psi(W), np.abs(W[:, 1]) ** 2)


def test_json_forms():
    psi = parse_test_function("0.25*u**2*v")
    data = psi.to_json()
    assert data["kind"] == "sphere"
    assert data["terms"] == [{"pow_u": 2, "pow_v": 1, "pow_w": 0, "coeff": 0.25}]


def test_chart_laplacian_accuracy():
    z = np.array([0.3 + 0.1j, -0.7j, 1.2])
    f = lambda q: np.abs(q) ** 4 + np.real(q**3)
    assert np.allclose(chart_laplacian(f, z), 16 * np.abs(z) ** 2, rtol=1e-8)


def test_complex_hessian():
    Z = np.array([[0.2 + 0.1j, -0.3j]])
    f = lambda q: np.abs(q[:, 0]) ** 2 * np.abs(q[:, 1]) ** 2
    H = complex_hessian(f, Z)[0]  # H[a, b] = d^2 f / dz_a dconj(z_b)
    a, b = Z[0]
    expected = np.array([[abs(b) ** 2, np.conj(a) * b], [a * np.conj(b), abs(a) ** 2]])
    assert np.allclose(H, expected, atol=1e-7)
