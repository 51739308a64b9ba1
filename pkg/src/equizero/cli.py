"""Command-line runner: ``equizero --config run.json [--outdir DIR] [--threads K] [--seed S]``.

The config is one JSON object with an ``experiment`` name, a ``seed`` and the
experiment's parameters.  If it also carries an ``acceptance`` entry (``true``
or a dict of threshold overrides) a failed check makes the run exit with 2.
"""

from __future__ import annotations

import argparse
import inspect
import json
import re
import sys
from pathlib import Path

from . import __version__
from . import experiments as ex
from .metric import MetricModel

EXIT_OK, EXIT_ERROR, EXIT_REJECTED = 0, 1, 2
MAX_SEED = 2**64


class ConfigError(ValueError):
    pass


def _ensemble(cfg, N_default, trials_default=1000):
    m = int(cfg.get("m", 1))
    metric = cfg.get("metric")
    metric = MetricModel.fs(m) if metric is None else MetricModel.from_json(dict(metric, m=m) if metric.get("kind", "FS") == "FS" else metric)
    return ex.EnsembleSpec(psi=cfg.get("psi", "u"), N=cfg.get("N", N_default), trials=int(cfg.get("trials", trials_default)),
                           seed=cfg["seed"], m=m, metric=metric, model=cfg.get("model", "Gaussian"),
                           method=cfg.get("method", "roots"), n_mc=int(cfg.get("n_mc", 4000)),
                           block=int(cfg.get("block", ex.DEFAULT_BLOCK)), threads=cfg["threads"])


def _metric(cfg, default=None):
    data = cfg.get("metric")
    if data is None:
        return default or MetricModel.fs(1)
    return MetricModel.from_json(data)


def _run_expected(cfg, acc):
    return ex.expected_pairing(_ensemble(cfg, 20), **acc)


def _run_variance(cfg, acc):
    return ex.variance_sweep(_ensemble(cfg, [8, 16, 32, 64, 128]), **acc)


def _run_sequence(cfg, acc):
    return ex.sequence_convergence(_ensemble(cfg, 1), N_max=int(cfg.get("N_max", 256)), **acc)


def _run_onb(cfg, acc):
    return ex.onb_zero_average(_ensemble(cfg, [8, 16, 32, 64]), basis=cfg.get("basis", "haar"), **acc)


def _run_ep(cfg, acc):
    return ex.ep_cesaro(cfg.get("psi", "u"), N_max=int(cfg.get("N_max", 48)), onb=cfg.get("onb", "HaarONB"),
                        metric=_metric(cfg), seed=cfg["seed"], threads=cfg["threads"], **acc)


def _run_szego(cfg, acc):
    return ex.szego_experiment(cfg.get("psi", "u"), Ns=tuple(cfg.get("N", [16, 32, 64])),
                               ks=tuple(cfg.get("k", [1, 2, 3])), metric=_metric(cfg), **acc)


def _run_orbit(cfg, acc):
    return ex.orbit_check(d=int(cfg.get("d", 3)), lambdas=cfg.get("lambdas"), n_lambdas=int(cfg.get("n_lambdas", 3)),
                          trials=int(cfg.get("trials", 100_000)), seed=cfg["seed"], threads=cfg["threads"], **acc)


def _run_moment4(cfg, acc):
    d = cfg.get("d", [2, 5, 10])
    return ex.moment4_experiment(ds=tuple([d] if isinstance(d, int) else d), trials=int(cfg.get("trials", 100_000)),
                                 seed=cfg["seed"], **acc)


def _run_gn(cfg, acc):
    return ex.gn_spread_experiment(ds=tuple(cfg.get("d", [4, 16, 64])), trials_outer=int(cfg.get("trials_outer", 12)),
                                   trials_inner=int(cfg.get("trials_inner", 20_000)), seed=cfg["seed"], **acc)


def _run_bergman(cfg, acc):
    metric = _metric(cfg, MetricModel.perturbed("0.3*u"))
    return ex.bergman_check(metric, Ns=tuple(cfg.get("N", [16, 32])), n_points=int(cfg.get("n_points", 200)),
                            seed=cfg["seed"], **acc)


def _run_common(cfg, acc):
    return ex.common_zeros_experiment(N=int(cfg.get("N", 4)), pairs=int(cfg.get("pairs", 100)), seed=cfg["seed"],
                                      threshold=float(cfg.get("threshold", 0.5)), **acc)


EXPERIMENTS = {
    "expected-pairing": _run_expected,
    "variance-sweep": _run_variance,
    "sequence": _run_sequence,
    "onb-average": _run_onb,
    "ep-cesaro": _run_ep,
    "szego": _run_szego,
    "orbit-check": _run_orbit,
    "moment4": _run_moment4,
    "gn-spread": _run_gn,
    "bergman-check": _run_bergman,
    "common-zeros": _run_common,
}

KNOWN_KEYS = {"experiment", "seed", "outdir", "threads", "acceptance", "psi", "N", "N_max", "trials", "m", "metric",
              "model", "method", "n_mc", "block", "basis", "onb", "k", "d", "lambdas", "n_lambdas", "trials_outer",
              "trials_inner", "n_points", "pairs", "threshold"}


def _line_of(text: str, key: str) -> int:
    for i, line in enumerate(text.splitlines(), 1):
        if re.search(r'"%s"\s*:' % re.escape(key), line):
            return i
    return 1


def load_config(path, seed=None, threads=None) -> dict:
    """Parse and validate a run config; raises ConfigError with a ``file:line:`` prefix."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ConfigError(f"{path}:1: cannot read config ({err.strerror})") from err
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}: invalid JSON: {err.msg}") from err
    if not isinstance(cfg, dict):
        raise ConfigError(f"{path}:1: config must be a JSON object")
    name = cfg.get("experiment")
    if name not in EXPERIMENTS:
        raise ConfigError(f"{path}:{_line_of(text, 'experiment')}: unknown experiment {name!r}; "
                          f"expected one of {', '.join(EXPERIMENTS)}")
    for key in cfg:
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{_line_of(text, key)}: unknown config key {key!r}")
    if seed is not None:
        cfg["seed"] = seed
    if "seed" not in cfg:
        raise ConfigError(f"{path}:1: a seed is required (config 'seed' or --seed)")
    if not isinstance(cfg["seed"], int) or not 0 <= cfg["seed"] < MAX_SEED:
        raise ConfigError(f"{path}:{_line_of(text, 'seed')}: seed must be an unsigned 64-bit integer")
    cfg["threads"] = int(threads if threads is not None else cfg.get("threads", 1))
    if cfg["threads"] < 1:
        raise ConfigError(f"{path}:{_line_of(text, 'threads')}: threads must be positive")
    acc = cfg.get("acceptance")
    if acc is not None and not isinstance(acc, (bool, dict)):
        raise ConfigError(f"{path}:{_line_of(text, 'acceptance')}: acceptance must be true/false or an object")
    return cfg


def _acceptance_kwargs(cfg) -> dict:
    acc = cfg.get("acceptance")
    if not isinstance(acc, dict):
        return {}
    target = {
        "expected-pairing": ex.expected_pairing, "variance-sweep": ex.variance_sweep,
        "sequence": ex.sequence_convergence, "onb-average": ex.onb_zero_average, "ep-cesaro": ex.ep_cesaro,
        "szego": ex.szego_experiment, "orbit-check": ex.orbit_check, "moment4": ex.moment4_experiment,
        "gn-spread": ex.gn_spread_experiment, "bergman-check": ex.bergman_check,
        "common-zeros": ex.common_zeros_experiment,
    }[cfg["experiment"]]
    allowed = set(inspect.signature(target).parameters)
    bad = set(acc) - allowed
    if bad:
        raise ConfigError(f"config: acceptance thresholds {sorted(bad)} do not apply to {cfg['experiment']}")
    return {k: tuple(v) if isinstance(v, list) else v for k, v in acc.items()}


def run(cfg: dict, outdir=None):
    """Run a validated config; returns (report, exit status)."""
    runner = EXPERIMENTS[cfg["experiment"]]
    report = runner(cfg, _acceptance_kwargs(cfg))
    resolved = {"experiment": cfg["experiment"], "seed": cfg["seed"], "threads": cfg["threads"], "version": __version__,
                "parameters": report.config, "acceptance": cfg.get("acceptance")}
    report.config = resolved
    report.write(outdir or cfg.get("outdir", "equizero-out"))
    gated = cfg.get("acceptance") not in (None, False)
    return report, (EXIT_REJECTED if gated and not report.passed else EXIT_OK)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="equizero", description="Run a zero-distribution experiment from a JSON config.")
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--outdir", help="directory for report.csv and report.json")
    parser.add_argument("--threads", type=int, help="worker threads (does not change results)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--version", action="version", version=f"equizero {__version__}")
    args = parser.parse_args(argv)
    cfg = {}
    try:
        cfg = load_config(args.config, args.seed, args.threads)
        report, status = run(cfg, args.outdir)
    except ConfigError as err:
        print(f"equizero: error: {err}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, RuntimeError, KeyError, TypeError, OSError) as err:
        print(f"equizero: error: {cfg.get('experiment', '?')}: {err}", file=sys.stderr)
        return EXIT_ERROR
    failed = [k for k, v in report.checks.items() if not v]
    print(f"{report.experiment}: {len(report.rows)} rows, "
          f"{'all checks passed' if not failed else 'failed: ' + ', '.join(failed)}")
    return status


if __name__ == "__main__":
    sys.exit(main())
