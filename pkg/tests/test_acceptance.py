"""Acceptance criteria, one test per criterion, all seeded from SEED.

Each test records a PASS/FAIL line; the lines are printed in the terminal
summary (see conftest.py).  Two criteria do not hold at the stated
thresholds and are marked as expected failures with the measured reason.
"""

import math

import numpy as np
import pytest

from equizero.experiments import (
    EnsembleSpec,
    bergman_check,
    common_zeros_experiment,
    density_one_extract,
    ep_cesaro,
    expected_pairing,
    gn_spread_experiment,
    moment4_experiment,
    orbit_check,
    sequence_convergence,
    szego_experiment,
    variance_sweep,
    y_statistic_experiment,
)
from equizero.metric import MetricModel
from equizero.projective import cp1_quadrature, sample_fs_points
from equizero.sections import Section, basis_values, dim_h0, monomial_norm_sq, multi_indices, sum_squares
from equizero.streams import derive_rng
from equizero.testfunctions import parse_test_function
from equizero.toeplitz import orbit_closed_form
from equizero.zeros import pair_pl, pair_roots, roots_cp1

SEED = 2025
RESULTS: dict = {}


def record(num: int, ok: bool, detail: str):
    RESULTS[num] = (bool(ok), detail)
    assert ok, detail


def test_01_exact_norms():
    worst = 0.0
    for N in range(51):
        rule = cp1_quadrature(max(2 * N, 1))
        W = rule.points
        for j in range(N + 1):
            exact = monomial_norm_sq(1, N, (N - j, j))
            quad = rule.integrate(np.abs(W[:, 0]) ** (2 * (N - j)) * np.abs(W[:, 1]) ** (2 * j))
            worst = max(worst, abs(quad / exact - 1))
    outside = 0
    checked = 0
    for N in range(7):
        W = sample_fs_points(2, 100_000, derive_rng(SEED, "norms", N))
        for J in multi_indices(2, N):
            x = np.prod(np.abs(W) ** (2 * J), axis=1)
            se = x.std(ddof=1) / math.sqrt(len(x))
            outside += abs(x.mean() - monomial_norm_sq(2, N, tuple(J))) > 3 * max(se, 1e-300)
            checked += 1
    record(1, worst <= 1e-8 and outside == 0,
           f"m=1 worst relative error {worst:.2e}; m=2 {outside}/{checked} outside 3 sigma")


def test_02_density_constancy():
    worst = 0.0
    for m in (1, 2):
        P = sample_fs_points(m, 100, derive_rng(SEED, "sumsq", m))
        for N in range(41):
            worst = max(worst, np.max(np.abs(sum_squares(m, N, P) / dim_h0(m, N) - 1)))
    record(2, worst <= 1e-9, f"worst relative deviation {worst:.2e}")


def test_03_mass_conservation():
    rng = derive_rng(SEED, "mass")
    bad = 0
    for i in range(500):
        N = int(rng.integers(1, 101))
        c = (rng.standard_normal(N + 1) + 1j * rng.standard_normal(N + 1)) / math.sqrt(2)
        if i % 5 == 0 and N > 4:
            c[: rng.integers(0, 2, endpoint=True)] = 0  # roots at [1:0]
            c[N + 1 - rng.integers(0, 2, endpoint=True):] = 0  # roots at [0:1]
        zs = roots_cp1(Section(1, N, c))
        bad += sum(zs.multiplicities) != N
    record(3, bad == 0, f"{bad}/500 sections with wrong total multiplicity")


@pytest.mark.parametrize("psi", ["u", "v", "u*v", "u**2 - 1/3"])
def test_04_expected_uniformity(psi):
    rep = expected_pairing(EnsembleSpec(psi=psi, N=(20,), trials=10_000, seed=SEED))
    z = rep.summary["z_score_N20"]
    ok, detail = RESULTS.get(4, (True, ""))
    record(4, ok and rep.passed, f"{detail} {psi}: z={z:+.2f}".strip())


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="the zero-pairing variance decays like N^-3, faster than the N^-2 upper bound; "
                                       "measured slope -2.90 +- 0.02 lies outside [-2.3, -1.7]")
def test_05_variance_decay():
    rep = variance_sweep(EnsembleSpec(psi="u", N=(8, 16, 32, 64, 128), trials=10_000, seed=SEED))
    fit = rep.fits["variance"]
    record(5, rep.passed, f"slope {fit['slope']:.3f} (95% CI {fit['ci'][0]:.3f}..{fit['ci'][1]:.3f})")


def test_06_almost_sure_sequence():
    rep = sequence_convergence(EnsembleSpec(psi="u", seed=SEED), N_max=256)
    s = rep.summary
    ok = rep.passed and s["control_limit"] == pytest.approx(1.0, abs=1e-12)
    record(6, ok, f"spearman {s['spearman_rho']:.3f}, p={s['p_value']:.1e}; z^N control error {s['control_limit']:.6f}")


def test_07_pl_root_cross_validation():
    psi = parse_test_function("u")
    agree = 0
    for i in range(500):
        rng = derive_rng(SEED, "pl-vs-roots", i)
        c = (rng.standard_normal(11) + 1j * rng.standard_normal(11)) / math.sqrt(2)
        s = Section(1, 10, c)
        pl = pair_pl(s, psi, n_mc=4000, rng=rng)
        agree += abs(pl.value - pair_roots(roots_cp1(s), psi).value) <= 3 * pl.std_error
    record(7, agree >= 495, f"{agree}/500 within 3 std_error")


def test_08_tian_bergman():
    rep = bergman_check(MetricModel.perturbed("0.3*u"), Ns=(16, 32), n_points=200, seed=SEED)
    t16, t32 = rep.get("tian_sup_deviation", 16), rep.get("tian_sup_deviation", 32)
    k16, k32 = rep.get("kodaira_sup_deviation", 16), rep.get("kodaira_sup_deviation", 32)
    ok = t32 <= 0.65 * t16 and k32 <= 0.65 * k16
    record(8, ok, f"Tian ratio {t32 / t16:.3f}, Kodaira ratio {k32 / k16:.3f}")


def test_09_perturbed_equidistribution():
    metric = MetricModel.perturbed("0.3*u")
    rep = expected_pairing(EnsembleSpec(psi="u", N=(32,), trials=10_000, seed=SEED, metric=metric))
    mean = rep.get("mean", 32)
    se = next(r["std_error"] for r in rep.rows if r["statistic"] == "mean")
    ref = rep.summary["reference"]
    ok = abs(mean - ref) <= max(3 * se, 0.15 / 32)
    record(9, ok, f"mean {mean:.5f} vs reference {ref:.5f} (se {se:.5f})")


def test_10_orbit_identity():
    bad = []
    for d in (2, 3, 5, 8):
        rep = orbit_check(d=d, n_lambdas=3, trials=100_000, seed=SEED, sigma=4.0)
        bad += [f"d={d}:{k}" for k, v in rep.checks.items() if not v]
        e1 = np.eye(d)[0]
        if orbit_closed_form(e1, d) != pytest.approx((d - 1) / (d * (d + 1)), rel=1e-14):
            bad.append(f"d={d}:e1")
        if orbit_closed_form(np.full(d, 0.7), d) > 1e-15:
            bad.append(f"d={d}:constant")
    record(10, not bad, "all within 4 sigma; exact cases hold" if not bad else "failed " + ", ".join(bad))


def test_11_fourth_moment():
    rep = moment4_experiment(ds=(2, 5, 10), trials=100_000, seed=SEED, sigma=3.0)
    z = [(rep.get("moment4", d) - rep.get("exact", d)) / next(r["std_error"] for r in rep.rows
         if r["statistic"] == "moment4" and r["N"] == d) for d in (2, 5, 10)]
    record(11, rep.passed, "z-scores " + ", ".join(f"{x:+.2f}" for x in z))


def test_12_szego_limit():
    rep = szego_experiment("u", Ns=(16, 32, 64), ks=(1, 2, 3), residual_max=0.2)
    detail = ", ".join(f"k{k} residual {rep.fits[f'k{k}']['max_relative_residual']:.3f}" for k in (2, 3))
    record(12, rep.passed, "k1 exact; " + detail)


def test_13_y_statistic():
    rep = y_statistic_experiment("u", N=32, trials=10_000, seed=SEED, sigma=4.0, rel=0.10)
    record(13, rep.passed, f"MC {rep.get('y_mean'):.4f}, exact {rep.get('exact_finite_d'):.4f}, limit 1/3")


def test_14_ergodic_control():
    ctl = ep_cesaro("u", N_max=48, onb="FixedMonomial", seed=SEED)
    RESULTS["14-control"] = (ctl.passed, f"monomial control {ctl.summary['cesaro_final']:.3f} >= 0.05")
    assert ctl.passed


@pytest.mark.xfail(strict=True, reason="E a_n = n/(3(n+2)^2) for psi = u, so the expected Cesaro ratio "
                                       "between N_max=48 and 12 is 0.511, just above the 0.5 bound")
def test_14_ergodic_haar():
    rep = ep_cesaro("u", N_max=48, onb="HaarONB", seed=SEED, ratio_max=0.5)
    ctl = RESULTS.get("14-control", (False, "control not run"))
    record(14, rep.passed and ctl[0], f"Haar ratio {rep.summary['ratio']:.3f}; {ctl[1]}")


def test_15_simultaneous_zeros():
    rep = common_zeros_experiment(N=4, pairs=100, seed=SEED, threshold=0.5, sigma=3.0)
    frac, vol = rep.get("region_fraction"), rep.get("region_volume")
    record(15, rep.passed, f"Bezout 16 in all pairs: {rep.checks['bezout']}; fraction {frac:.4f} vs volume {vol:.4f}")


def test_16_density_one():
    n = np.arange(1, 10_001)
    root = np.round(np.sqrt(n)).astype(int)
    squares = (root**2 == n).astype(float)
    idx = density_one_extract(squares)
    ok1 = np.array_equal(idx, np.nonzero(squares == 0)[0])
    ok2 = np.array_equal(density_one_extract(1.0 / n), np.arange(len(n)))
    try:
        density_one_extract(np.ones(len(n)))
        ok3 = False
    except ValueError as err:
        ok3 = "no density-one subsequence detectable" in str(err)
    record(16, ok1 and ok2 and ok3, f"squares {ok1}, harmonic {ok2}, constant raises {ok3}")


def test_17_gn_boundedness():
    rep = gn_spread_experiment(ds=(4, 16, 64), seed=SEED)
    s4, s64 = rep.get("spread", 4), rep.get("spread", 64)
    record(17, s64 <= 2 * s4 + 0.5, f"spread(4)={s4:.3f}, spread(64)={s64:.3f}")
