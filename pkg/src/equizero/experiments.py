"""Reproducible statistical experiments on random sections and their zeros.

Every experiment returns an :class:`ExperimentReport`: rows of
``(N, statistic, value, std_error, n)``, fitted exponents, a summary, and a
dictionary of named pass/fail checks whose thresholds are arguments with
conservative defaults.  Random numbers come from streams derived from the
seed, the experiment tag, N and the block index (see :mod:`equizero.streams`).
"""

from __future__ import annotations

import csv
import functools
import hashlib
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import integrate, stats

from .bergman import bergman_basis, bergman_density, kodaira_pullback_density
from .haar import complex_normal, haar_unitary
from .metric import MetricModel
from .projective import cp1_quadrature, sample_fs_points
from .sections import Section, column_masses, dim_h0, sample_gaussian
from .streams import DEFAULT_BLOCK, block_map, derive_rng, ordered_map
from .testfunctions import parse_test_function
from .toeplitz import (
    gn_spread,
    gn_value,
    log_gaussian_second_moment,
    orbit_closed_form,
    orbit_functional_batch,
    sphere_moment4,
    szego_trace,
    toeplitz_build,
    y_statistic_batch,
)
from .zeros import common_zeros_cp2, exact_term, pair_pl, pair_roots, pair_roots_batch, roots_cp1

__all__ = [
    "EnsembleSpec",
    "ExperimentReport",
    "expected_pairing",
    "variance_sweep",
    "sequence_convergence",
    "onb_zero_average",
    "ep_cesaro",
    "density_one_extract",
    "szego_experiment",
    "orbit_check",
    "moment4_experiment",
    "y_statistic_experiment",
    "gn_spread_experiment",
    "bergman_check",
    "common_zeros_experiment",
]

SCHEMA = 1
MODELS = ("Gaussian", "Sphere", "HaarONB")


def _version() -> str:
    from . import __version__

    return __version__


@dataclass(frozen=True)
class EnsembleSpec:
    """Which random sections to draw and what to pair their zeros with."""

    psi: object = "u"
    N: tuple = (20,)
    trials: int = 1000
    seed: int = 0
    m: int = 1
    metric: MetricModel | None = None
    model: str = "Gaussian"
    method: str = "roots"
    n_mc: int = 4000
    block: int = DEFAULT_BLOCK
    threads: int = 1

    def __post_init__(self):
        Ns = (self.N,) if np.isscalar(self.N) else tuple(self.N)
        object.__setattr__(self, "N", tuple(int(n) for n in Ns))
        metric = self.metric or MetricModel.fs(self.m)
        if isinstance(metric, dict):
            metric = MetricModel.from_json(metric)
        object.__setattr__(self, "metric", metric)
        if isinstance(self.psi, str) or np.isscalar(self.psi):
            object.__setattr__(self, "psi", parse_test_function(str(self.psi), self.m))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if self.method not in ("roots", "pl"):
            raise ValueError("method must be 'roots' or 'pl'")
        if self.method == "roots" and self.m != 1:
            raise ValueError("root-based pairings need m = 1")
        if self.metric.m != self.m:
            raise ValueError("metric/dimension mismatch")
        if any(n < 1 for n in self.N):
            raise ValueError("degrees must be positive")

    def to_json(self) -> dict:
        return {"psi": str(self.psi), "N": list(self.N), "trials": self.trials, "seed": self.seed,
                "m": self.m, "metric": self.metric.to_json(), "model": self.model,
                "method": self.method, "n_mc": self.n_mc, "block": self.block}


@dataclass
class ExperimentReport:
    experiment: str
    config: dict = field(default_factory=dict)
    seed: int = 0
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, N, statistic: str, value, std_error=0.0, n=0):
        self.rows.append({"N": int(N), "statistic": statistic, "value": float(value),
                          "std_error": float(std_error), "n": int(n)})

    def get(self, statistic: str, N=None) -> float:
        for r in self.rows:
            if r["statistic"] == statistic and (N is None or r["N"] == N):
                return r["value"]
        raise KeyError((statistic, N))

    def series(self, statistic: str) -> tuple[np.ndarray, np.ndarray]:
        sel = [r for r in self.rows if r["statistic"] == statistic]
        return np.array([r["N"] for r in sel]), np.array([r["value"] for r in sel])

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "statistic", "value", "std_error", "n"])
        for r in self.rows:
            w.writerow([r["N"], r["statistic"], format(r["value"], ".17g"),
                        format(r["std_error"], ".17g"), r["n"]])
        return buf.getvalue()

    def to_json(self) -> dict:
        canon = json.dumps(self.config, sort_keys=True, separators=(",", ":")).encode()
        blob = hashlib.sha1(b"blob %d\0" % len(canon) + canon).hexdigest()
        return {"schema": SCHEMA, "experiment": self.experiment, "version": _version(),
                "seed": self.seed, "config": self.config, "input_hash": blob,
                "fits": _jsonable(self.fits), "summary": _jsonable(self.summary),
                "checks": _jsonable(self.checks), "passed": self.passed,
                "wall_time": self.wall_time, "rows": self.rows}

    def write(self, outdir) -> tuple[Path, Path]:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = out / "report.csv", out / "report.json"
        csv_path.write_text(self.csv_text())
        json_path.write_text(json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n")
        return csv_path, json_path


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x) if math.isfinite(x) else None
    return x


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.wall_time = time.perf_counter() - t0
        return rep

    return wrapper


# ------------------------------------------------------------- sampling ----

def draw_coefficients(spec: EnsembleSpec, N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Reference-basis coefficients of ``count`` random sections, as columns."""
    d = dim_h0(spec.m, N)
    if spec.model == "HaarONB":
        A = haar_unitary(d, rng, size=count)[:, :, 0].T
    else:
        A = complex_normal((d, count), rng)
        if spec.model == "Sphere":
            A = A / np.linalg.norm(A, axis=0)
    if not spec.metric.is_fs:
        A = bergman_basis(spec.metric, N).coefficients @ A
    return A


def pairings(spec: EnsembleSpec, N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``((1/N) Z_s, psi)`` for ``count`` fresh random sections."""
    C = draw_coefficients(spec, N, count, rng)
    if spec.method == "roots":
        return pair_roots_batch(C, N, spec.psi)
    return np.array([pair_pl(Section(spec.m, N, c), spec.psi, spec.metric, spec.n_mc, rng).value for c in C.T])


def _trial_values(spec: EnsembleSpec, N: int, tag: str) -> np.ndarray:
    return block_map(lambda count, rng: pairings(spec, N, count, rng), spec.trials, spec.seed,
                     keys=(tag, N), block=spec.block, threads=spec.threads)


def _variance_se(x: np.ndarray) -> float:
    n = len(x)
    if n < 4:
        return float("inf")
    var = np.var(x, ddof=1)
    m4 = np.mean((x - x.mean()) ** 4)
    return float(np.sqrt(max(m4 - (n - 3) / (n - 1) * var**2, 0.0) / n))


def _loglog_fit(Ns, values, level: float = 0.95) -> dict:
    Ns, values = np.asarray(Ns, float), np.asarray(values, float)
    if np.any(values <= 0):
        return {"slope": None, "reason": "nonpositive values"}
    fit = stats.linregress(np.log(Ns), np.log(values))
    dof = len(Ns) - 2
    t = stats.t.ppf(0.5 + level / 2, dof) if dof > 0 else float("inf")
    return {"slope": fit.slope, "intercept": fit.intercept, "stderr": fit.stderr,
            "ci": [fit.slope - t * fit.stderr, fit.slope + t * fit.stderr], "r": fit.rvalue}


# ---------------------------------------------------------- experiments ----

@_timed
def expected_pairing(spec: EnsembleSpec, sigma: float = 3.0, drift: float = 0.15) -> ExperimentReport:
    """Monte Carlo mean of the normalized zero current paired with psi.

    The reference is ``int psi kappa dV_FS`` (``int psi dV`` for FS).  A
    perturbed metric gets the extra allowance ``drift / N`` for the
    subleading Bergman correction.
    """
    rep = ExperimentReport("expected-pairing", spec.to_json(), spec.seed)
    ref = exact_term(spec.psi, spec.metric)
    for N in spec.N:
        x = _trial_values(spec, N, "expected")
        mean, var = float(x.mean()), float(np.var(x, ddof=1)) if len(x) > 1 else 0.0
        se = math.sqrt(var / len(x))
        rep.add(N, "mean", mean, se, len(x))
        rep.add(N, "variance", var, _variance_se(x), len(x))
        rep.add(N, "reference", ref)
        tol = max(sigma * se, 0.0 if spec.metric.is_fs else drift / N, 1e-12)
        rep.checks[f"mean_N{N}"] = abs(mean - ref) <= tol
        rep.summary[f"z_score_N{N}"] = (mean - ref) / se if se > 0 else 0.0
    rep.summary["reference"] = ref
    return rep


@_timed
def variance_sweep(spec: EnsembleSpec, slope_range=(-2.3, -1.7)) -> ExperimentReport:
    """Per-N variance of the zero pairing and its log-log slope in N."""
    if len(spec.N) < 4:
        raise ValueError("cannot fit slope")
    if spec.m != 1 or not spec.metric.is_fs:
        raise ValueError("variance sweeps use the FS metric on CP^1")
    rep = ExperimentReport("variance-sweep", spec.to_json(), spec.seed)
    variances = []
    for N in spec.N:
        x = _trial_values(spec, N, "variance")
        v = float(np.var(x, ddof=1))
        variances.append(v)
        rep.add(N, "variance", v, _variance_se(x), len(x))
    if max(variances) == 0:
        rep.fits["variance"] = {"slope": None, "reason": "zero variance"}
        rep.checks["zero_variance"] = True
        return rep
    fit = _loglog_fit(spec.N, variances)
    rep.fits["variance"] = fit
    lo, hi = slope_range
    rep.checks["slope_in_range"] = fit["slope"] is not None and lo <= fit["slope"] <= hi
    return rep


@_timed
def sequence_convergence(spec: EnsembleSpec, N_max: int = 256, exponent: float = 0.4,
                         alpha: float = 0.01) -> ExperimentReport:
    """One independent section per degree N = 1..N_max (a draw from the product space).

    Records ``e_N = |((1/N) Z, psi) - int psi dV|`` and the deterministic
    control ``s_N = z^N``, whose zeros all sit at [1:0].
    """
    rep = ExperimentReport("sequence", dict(spec.to_json(), N_max=N_max), spec.seed)
    ref = exact_term(spec.psi, spec.metric)
    Ns = np.arange(1, N_max + 1)

    def one(N):
        rng = derive_rng(spec.seed, "sequence", int(N))
        return abs(float(pairings(spec, int(N), 1, rng)[0]) - ref)

    errors = np.array(ordered_map(one, Ns, spec.threads))
    control = np.array([abs(pair_roots(roots_cp1(Section(1, int(N), np.eye(N + 1)[N])), spec.psi).value - ref)
                        for N in Ns])
    for N, e, c in zip(Ns, errors, control):
        rep.add(N, "error", e)
        rep.add(N, "control_error", c)
    tail = Ns >= N_max // 4
    rep.summary["weighted_max"] = float(np.max(errors[tail] * Ns[tail] ** exponent))
    rep.summary["control_limit"] = float(control[-1])
    if np.all(errors == 0):
        rep.summary["spearman_rho"] = 0.0
        rep.summary["p_value"] = 1.0
        rep.checks["all_errors_zero"] = True
        return rep
    rho, p = stats.spearmanr(Ns, errors)
    rep.summary["spearman_rho"] = float(rho)
    rep.summary["p_value"] = float(p)
    rep.checks["rank_correlation_negative"] = bool(rho < 0 and p < alpha)
    return rep


@_timed
def onb_zero_average(spec: EnsembleSpec, basis: str = "haar", max_slope: float = -1.5,
                     floor: float = 0.05) -> ExperimentReport:
    """``(1/d) sum_j (((1/N) Z_{S_j}, psi) - int psi dV)^2`` for one orthonormal basis per N."""
    if basis not in ("haar", "monomial"):
        raise ValueError("basis must be 'haar' or 'monomial'")
    rep = ExperimentReport("onb-average", dict(spec.to_json(), basis=basis), spec.seed)
    ref = exact_term(spec.psi, spec.metric)

    def one(N):
        d = dim_h0(1, N)
        U = haar_unitary(d, derive_rng(spec.seed, "onb", N)) if basis == "haar" else np.eye(d, dtype=complex)
        C = U if spec.metric.is_fs else bergman_basis(spec.metric, N).coefficients @ U
        p = pair_roots_batch(C, N, spec.psi)
        return float(np.mean((p - ref) ** 2))

    avgs = ordered_map(one, spec.N, spec.threads)
    for N, a in zip(spec.N, avgs):
        rep.add(N, "onb_average", a, 0.0, dim_h0(1, N))
    if max(avgs) == 0:
        rep.checks["zero_average"] = True
        return rep
    if len(spec.N) >= 2:
        rep.fits["onb_average"] = _loglog_fit(spec.N, avgs)
    if basis == "haar":
        slope = rep.fits.get("onb_average", {}).get("slope")
        rep.checks["decay"] = slope is not None and slope <= max_slope
    else:
        rep.checks["no_decay"] = avgs[-1] >= floor
    return rep


@_timed
def ep_cesaro(psi, N_max: int = 48, onb: str = "HaarONB", metric: MetricModel | None = None,
              seed: int = 0, threads: int = 1, ratio_max: float = 0.5, floor: float = 0.05) -> ExperimentReport:
    """Cesaro means of ``a_n = (1/d_n) sum_j (int psi ||S_j||^2 dV - mean psi)^2``."""
    metric = metric or MetricModel.fs(1)
    psi = parse_test_function(psi) if isinstance(psi, str) else psi
    if onb not in ("HaarONB", "FixedMonomial"):
        raise ValueError("onb must be 'HaarONB' or 'FixedMonomial'")
    config = {"psi": str(psi), "N_max": N_max, "onb": onb, "metric": metric.to_json(), "seed": seed}
    rep = ExperimentReport("ep-cesaro", config, seed)
    mean_psi = exact_term(psi, metric)

    def one(n):
        if psi.is_constant:
            return 0.0  # unit sections have mass exactly 1
        d = n + 1
        U = haar_unitary(d, derive_rng(seed, "ep", n)) if onb == "HaarONB" else np.eye(d, dtype=complex)
        if metric.is_fs:
            rule = cp1_quadrature(2 * n + psi.degree)
            C = U
        else:
            from .bergman import bergman_rule

            rule = bergman_rule(metric, n)
            rule = rule if rule.degree >= 2 * n + psi.degree else cp1_quadrature(2 * n + psi.degree + 48)
            C = bergman_basis(metric, n).coefficients @ U
        A = column_masses(C, 1, n, psi, metric, rule)
        return float(np.mean((A - mean_psi) ** 2))

    a = np.array(ordered_map(one, range(1, N_max + 1), threads))
    ces = np.cumsum(a) / np.arange(1, N_max + 1)
    for n in range(1, N_max + 1):
        rep.add(n, "a", a[n - 1], 0.0, n + 1)
        rep.add(n, "cesaro", ces[n - 1])
    quarter = max(N_max // 4, 1)
    rep.summary["cesaro_final"] = float(ces[-1])
    rep.summary["cesaro_quarter"] = float(ces[quarter - 1])
    if ces[-1] == 0:
        rep.checks["zero_statistic"] = True
    elif onb == "HaarONB":
        rep.summary["ratio"] = float(ces[-1] / ces[quarter - 1])
        rep.checks["cesaro_decay"] = ces[-1] <= ratio_max * ces[quarter - 1]
    else:
        rep.checks["control_floor"] = ces[-1] >= floor
    return rep


def density_one_extract(values, weights=None, max_level: int = 60) -> np.ndarray:
    """Indices of a relative-density-one set along which ``values`` tend to 0.

    With thresholds ``eps_k = 2^-k`` let ``l_k`` be the first index after which
    the (weighted) Cesaro means never exceed ``eps_k^2``.  The largest level k
    that still has exceedances ``a_n > eps_k`` beyond ``l_k`` decides the
    exclusions: every index with ``a_n > eps_k`` is dropped.  By Chebyshev the
    dropped weight is at most ``c_L / eps_k <= sqrt(c_L)`` of the total.
    Returns 0-based indices.
    """
    a = np.asarray(values, dtype=float)
    if a.ndim != 1 or len(a) == 0 or np.any(a < 0):
        raise ValueError("values must be a nonempty sequence of nonnegative reals")
    w = np.ones_like(a) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != a.shape or np.any(w <= 0):
        raise ValueError("weights must be positive and match the values")
    ces = np.cumsum(w * a) / np.cumsum(w)
    tail_sup = np.maximum.accumulate(ces[::-1])[::-1]
    chosen = None
    for k in range(1, max_level + 1):
        eps = 2.0**-k
        ok = np.nonzero(tail_sup <= eps**2)[0]
        if len(ok) == 0:
            break
        if np.any(a[ok[0]:] > eps):
            chosen = eps
    if tail_sup[-1] > 0.25:
        raise ValueError("no density-one subsequence detectable at this length")
    if chosen is None:
        return np.arange(len(a))
    return np.nonzero(a <= chosen)[0]


@_timed
def szego_experiment(psi, Ns=(16, 32, 64), ks=(1, 2, 3), metric: MetricModel | None = None,
                     residual_max: float = 0.2) -> ExperimentReport:
    """``(1/d) Tr T^k`` against ``int psi^k dV`` and the fit ``C / N`` of the gap."""
    metric = metric or MetricModel.fs(1)
    psi = parse_test_function(psi) if isinstance(psi, str) else psi
    rep = ExperimentReport("szego", {"psi": str(psi), "N": list(Ns), "k": list(ks), "metric": metric.to_json()}, 0)
    rule = cp1_quadrature(max(ks) * psi.degree + 8 + (0 if metric.is_fs else metric.rho.degree))
    W = rule.points
    kappa = metric.volume_density(W)
    traces = {N: toeplitz_build(psi, N, metric) for N in Ns}
    for k in ks:
        ref = float(rule.integrate(psi(W) ** k * kappa))
        gaps = []
        for N in Ns:
            t = szego_trace(traces[N], k)
            rep.add(N, f"trace_k{k}", t)
            gaps.append(t - ref)
        rep.summary[f"reference_k{k}"] = ref
        gaps = np.array(gaps)
        Narr = np.array(Ns, dtype=float)
        if k == 1 and metric.is_fs:
            rep.checks["k1_exact"] = bool(np.max(np.abs(gaps)) <= 1e-9)
            continue
        C = float(np.sum(gaps / Narr) / np.sum(1.0 / Narr**2))
        CN = gaps * Narr
        if np.max(np.abs(CN)) <= 1e-9:
            resid = 0.0
        else:
            resid = float(np.max(np.abs(CN - C)) / abs(C))
        rep.fits[f"k{k}"] = {"C": C, "CN": CN.tolist(), "max_relative_residual": resid}
        rep.checks[f"k{k}_fits_C_over_N"] = resid <= residual_max
    return rep


@_timed
def orbit_check(d: int = 3, lambdas=None, n_lambdas: int = 3, trials: int = 100_000, seed: int = 0,
                sigma: float = 4.0, block: int = DEFAULT_BLOCK, threads: int = 1) -> ExperimentReport:
    """Haar average of the orbit functional against its exact finite-d value."""
    rng = derive_rng(seed, "orbit-lambda", d)
    lams = [np.asarray(l, dtype=float) for l in lambdas] if lambdas else [rng.standard_normal(d) for _ in range(n_lambdas)]
    config = {"d": d, "trials": trials, "seed": seed, "lambdas": [l.tolist() for l in lams]}
    rep = ExperimentReport("orbit-check", config, seed)
    for i, lam in enumerate(lams):
        x = block_map(lambda n, r: orbit_functional_batch(lam, n, r), trials, seed,
                      keys=("orbit", d, i), block=block, threads=threads)
        exact = orbit_closed_form(lam, d)
        se = float(np.std(x, ddof=1) / math.sqrt(len(x)))
        rep.add(d, f"mc_{i}", x.mean(), se, len(x))
        rep.add(d, f"exact_{i}", exact)
        rep.checks[f"lambda_{i}"] = abs(x.mean() - exact) <= max(sigma * se, 1e-12)
    return rep


@_timed
def moment4_experiment(ds=(2, 5, 10), trials: int = 100_000, seed: int = 0, sigma: float = 3.0) -> ExperimentReport:
    """``E|a_1|^4`` on the unit sphere of C^d against ``2 / (d (d+1))``."""
    rep = ExperimentReport("moment4", {"d": list(ds), "trials": trials, "seed": seed}, seed)
    for d in ds:
        est = sphere_moment4(d, trials, derive_rng(seed, "moment4", d))
        exact = 2.0 / (d * (d + 1))
        rep.add(d, "moment4", est.value, est.std_error, est.n_samples)
        rep.add(d, "exact", exact)
        rep.checks[f"d{d}"] = abs(est.value - exact) <= max(sigma * est.std_error, 1e-12)
    return rep


@_timed
def y_statistic_experiment(psi="u", N: int = 32, trials: int = 10_000, seed: int = 0,
                           sigma: float = 4.0, rel: float = 0.10) -> ExperimentReport:
    """Haar mean of Y for the Toeplitz matrix of psi, against the exact finite-d value."""
    psi = parse_test_function(psi) if isinstance(psi, str) else psi
    rep = ExperimentReport("y-statistic", {"psi": str(psi), "N": N, "trials": trials, "seed": seed}, seed)
    T = toeplitz_build(psi, N)
    y = y_statistic_batch(T, trials, derive_rng(seed, "y", N))
    exact = orbit_closed_form(np.linalg.eigvalsh(T.entries))
    rule = cp1_quadrature(2 * psi.degree + 2)
    vals = psi(rule.points)
    limit = float(rule.integrate(vals**2) - rule.integrate(vals) ** 2)
    se = float(np.std(y, ddof=1) / math.sqrt(trials))
    rep.add(N, "y_mean", y.mean(), se, trials)
    rep.add(N, "exact_finite_d", exact)
    rep.add(N, "limit", limit)
    rep.checks["matches_exact"] = abs(y.mean() - exact) <= max(sigma * se, 1e-12)
    rep.checks["near_limit"] = abs(exact - limit) <= rel * max(abs(limit), 1e-12) if limit else exact == 0
    return rep


@_timed
def gn_spread_experiment(ds=(4, 16, 64), trials_outer: int = 12, trials_inner: int = 20_000, seed: int = 0,
                         factor: float = 2.0, offset: float = 0.5, d_cs: int = 8) -> ExperimentReport:
    """Spread of the sphere log-log correlation over random pairs, plus the x = y vs x _|_ y check."""
    config = {"d": list(ds), "trials_outer": trials_outer, "trials_inner": trials_inner, "seed": seed}
    rep = ExperimentReport("gn-spread", config, seed)
    spreads = {}
    for d in ds:
        res = gn_spread(d, trials_outer, trials_inner, derive_rng(seed, "gn", d))
        spreads[d] = res["spread"]
        rep.add(d, "spread", res["spread"], res["max_std_error"], trials_outer)
        if res["noise_dominated"]:
            rep.summary[f"noise_dominated_d{d}"] = True
    if len(ds) >= 2:
        lo, hi = min(ds), max(ds)
        rep.checks["bounded_spread"] = spreads[hi] <= factor * spreads[lo] + offset
    rng = derive_rng(seed, "gn-cs", d_cs)
    x = np.zeros(d_cs, complex)
    x[0] = 1
    y = np.zeros(d_cs, complex)
    y[1] = 1
    same = gn_value(x, x, trials_inner, rng)
    perp = gn_value(x, y, trials_inner, rng)
    bound = 2.0 * same.value
    rep.add(d_cs, "G_same", same.value, same.std_error, trials_inner)
    rep.add(d_cs, "G_perp", perp.value, perp.std_error, trials_inner)
    rep.summary["gaussian_log_second_moment"] = log_gaussian_second_moment()
    rep.checks["cauchy_schwarz"] = bool(np.isfinite(same.value) and np.isfinite(perp.value)
                                        and abs(same.value - perp.value) <= bound)
    return rep


@_timed
def bergman_check(metric: MetricModel | None = None, Ns=(16, 32), n_points: int = 200, seed: int = 0,
                  contraction: float = 0.65) -> ExperimentReport:
    """Tian density and Kodaira pullback deviations at successive N."""
    metric = metric or MetricModel.perturbed("0.3*u")
    rep = ExperimentReport("bergman-check", {"metric": metric.to_json(), "N": list(Ns),
                                             "n_points": n_points, "seed": seed}, seed)
    P = sample_fs_points(1, n_points, derive_rng(seed, "bergman-points"))
    kappa = metric.volume_density(P)
    tian, kod = [], []
    for N in Ns:
        b = bergman_basis(metric, N)
        dens = bergman_density(b, P)
        rule = cp1_quadrature(2 * N + 80)
        total = float(rule.integrate(bergman_density(b, rule.points) * metric.volume_density(rule.points)))
        t = float(np.max(np.abs(dens / N - 1.0)))
        kd = kodaira_pullback_density(b, N, P)
        k = float(np.max(np.abs(kd - kappa)))
        tian.append(t)
        kod.append(k)
        rep.add(N, "tian_sup_deviation", t, 0.0, n_points)
        rep.add(N, "kodaira_sup_deviation", k, 0.0, n_points)
        rep.add(N, "density_integral", total)
        rep.checks[f"integral_N{N}"] = abs(total - (N + 1)) <= 1e-6 * (N + 1)
        rep.checks[f"kodaira_positive_N{N}"] = bool(kd.min() >= 0)
    for i in range(1, len(Ns)):
        rep.checks[f"tian_contracts_{Ns[i]}"] = tian[i] <= contraction * tian[i - 1]
        rep.checks[f"kodaira_contracts_{Ns[i]}"] = kod[i] <= contraction * kod[i - 1]
    return rep


def _cap_volume(threshold: float) -> float:
    # |w_0|^2 has density 2 (1 - t) under the FS volume of CP^2
    return integrate.quad(lambda t: 2.0 * (1.0 - t), threshold, 1.0)[0]


@_timed
def common_zeros_experiment(N: int = 4, pairs: int = 100, seed: int = 0, threshold: float = 0.5,
                            sigma: float = 3.0) -> ExperimentReport:
    """Bezout count and the fraction of common zeros in ``{|w_0|^2 > threshold}``."""
    rep = ExperimentReport("common-zeros", {"N": N, "pairs": pairs, "seed": seed, "threshold": threshold}, seed)
    counts, inside = [], 0
    for i in range(pairs):
        rng = derive_rng(seed, "common-zeros", N, i)
        s1, s2 = sample_gaussian(2, N, rng), sample_gaussian(2, N, rng)
        zs = common_zeros_cp2(s1, s2, rng)
        counts.append(sum(k for _, k in zs))
        W = np.array([p.homogeneous for p, _ in zs])
        inside += int(np.sum(np.abs(W[:, 0]) ** 2 > threshold))
    total = sum(counts)
    frac = inside / total
    vol = _cap_volume(threshold)
    se = math.sqrt(vol * (1 - vol) / total)
    rep.add(N, "bezout_exact_fraction", np.mean(np.array(counts) == N * N), 0.0, pairs)
    rep.add(N, "region_fraction", frac, se, total)
    rep.add(N, "region_volume", vol)
    rep.checks["bezout"] = all(c == N * N for c in counts)
    rep.checks["region"] = abs(frac - vol) <= sigma * se
    return rep
