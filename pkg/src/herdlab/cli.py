"""Command-line entry point; modes are documented in docs/schemas.md.

All payload files (CSV, JSON) are byte-identical across reruns with the
same configuration.  Wall time and timestamps live only in the metadata
sidecar written next to each output.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from .beliefs import Action, Environment
from .config import ConfigError, ExperimentConfig, build_config
from .herdpath import classify_regime, compute_herd_path, immediate_herd_prob
from .montecarlo import StateDraw, run_batch, tau_scaling_experiment
from .oracle import enumerate_tree
from .signals import CanonicalFamily, State


def _version() -> str:
    try:
        from importlib.metadata import version
        return version("herdlab")
    except Exception:
        return "unknown"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return ";".join(str(v) for v in value)
    return str(value)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _write_sidecar(out_path: str, cfg: ExperimentConfig, mode: str,
                   wall_seconds: float) -> None:
    config = dict(cfg.as_dict(), mode=mode)
    # hash only what determines payload bytes: same digest must mean same
    # output, so file locations and worker count stay out of it
    hashed = {k: v for k, v in config.items()
              if k not in ("out", "per_trial_out", "workers")}
    digest = hashlib.sha256(
        json.dumps(hashed, sort_keys=True).encode()).hexdigest()
    _write_json(out_path + ".meta.json", {
        "config": config,
        "config_sha256": digest,
        "package_version": _version(),
        "wall_time_seconds": wall_seconds,
        "created_utc": datetime.now(timezone.utc).isoformat(),
    })


def _env(cfg: ExperimentConfig) -> Environment:
    return Environment(CanonicalFamily(cfg.alpha), CanonicalFamily(cfg.alpha_tilde),
                       cfg.prior)


_STATE = {"high": State.HIGH, "low": State.LOW}
_ACTION = {"high": Action.HIGH, "low": Action.LOW}
_DRAW = {"fixed_high": StateDraw.FIXED_HIGH, "fixed_low": StateDraw.FIXED_LOW,
         "from_prior": StateDraw.FROM_PRIOR}


def _mode_dist(cfg: ExperimentConfig) -> None:
    fam = CanonicalFamily(cfg.alpha)
    q = np.linspace(0.0, 1.0, cfg.grid_points)
    f = np.asarray(fam.marginal_cdf(q))
    fl = np.asarray(fam.conditional_cdf(State.LOW, q))
    fh = np.asarray(fam.conditional_cdf(State.HIGH, q))
    rows = zip((float(v) for v in q), (float(v) for v in f),
               (float(v) for v in fl), (float(v) for v in fh))
    _write_csv(cfg.out, ("q", "F", "F_low", "F_high"), rows)


def _mode_path(cfg: ExperimentConfig) -> None:
    path = compute_herd_path(_env(cfg), cfg.horizon)
    rows = ((n + 1, float(path.true_log_odds[n]), float(path.perceived_log_odds[n]),
             float(path.perceived_complement[n])) for n in range(path.length))
    _write_csv(cfg.out, ("n", "r_h", "r_tilde_h", "one_minus_pi_tilde_h"), rows)


def _mode_herdprob(cfg: ExperimentConfig) -> None:
    env = _env(cfg)
    state = _STATE[cfg.conditioning_state]
    action = _ACTION[cfg.herd_action]
    checkpoints = []
    n = 10
    while n < cfg.horizon:
        if n >= 10:
            checkpoints.append(n)
        n *= 10
    checkpoints.append(cfg.horizon)
    rows = []
    for trunc in checkpoints:
        b = immediate_herd_prob(env, state, action, trunc)
        rows.append((b.truncation_n, b.lower, b.upper,
                     b.tail_bound if math.isfinite(b.tail_bound) else "inf"))
    _write_csv(cfg.out, ("N", "lower", "upper", "tail_bound"), rows)


def _mode_oracle(cfg: ExperimentConfig) -> None:
    summary = enumerate_tree(_env(cfg), _STATE[cfg.conditioning_state], cfg.depth)
    _write_json(cfg.out, {
        "depth": summary.depth,
        "state": summary.state.value,
        "total_prob": summary.total_prob,
        "expected_wrong_actions": summary.expected_wrong_actions,
        "prob_all_correct": summary.prob_all_correct,
        "prob_first_correct_by": list(summary.prob_first_correct_by),
    })


_TRIAL_COLUMNS = ("trial", "seed", "realized_state", "wrong_count", "tau",
                  "first_wrong_index", "last_wrong_index", "last_switch_index",
                  "bad_run_count", "bad_run_lengths", "final_one_minus_pi_tilde",
                  "herded_correct", "wrong_herd_proxy", "wrong_herd_proxy_strict")


def _mode_simulate(cfg: ExperimentConfig) -> None:
    run = run_batch(_env(cfg), cfg.horizon, cfg.trials, cfg.seed,
                    _DRAW[cfg.state_draw], cfg.workers)
    _write_json(cfg.out, run.summary.as_dict())
    if cfg.per_trial_out:
        rows = ((t.index, t.seed, t.realized_state.value, t.wrong_count, t.tau,
                 t.first_wrong_index, t.last_wrong_index, t.last_switch_index,
                 t.bad_run_count, t.bad_run_lengths, t.final_one_minus_pi_tilde,
                 t.herded_correct, t.wrong_herd_proxy, t.wrong_herd_proxy_strict)
                for t in run.trials)
        _write_csv(cfg.per_trial_out, _TRIAL_COLUMNS, rows)


def _mode_tau(cfg: ExperimentConfig) -> None:
    rows = tau_scaling_experiment(CanonicalFamily(cfg.alpha),
                                  CanonicalFamily(cfg.alpha_tilde),
                                  cfg.priors, cfg.horizon, cfg.trials, cfg.seed,
                                  cfg.workers)
    out_rows = ((r.prior, r.n_trials, r.mean_tau, r.mean_tau_ci[0], r.mean_tau_ci[1],
                 r.frac_not_reached, r.prior_odds_against, r.ratio_to_odds)
                for r in rows)
    _write_csv(cfg.out, ("prior", "n_trials", "mean_tau", "tau_ci_lo", "tau_ci_hi",
                         "frac_not_reached", "prior_odds_against", "ratio_to_odds"),
               out_rows)


def _mode_sweep(cfg: ExperimentConfig) -> int:
    rows = []
    failures = 0
    for alpha in cfg.alpha_list:           # grid order: alpha outer,
        for alpha_tilde in cfg.alpha_tilde_list:  # alpha_tilde inner
            try:
                env = Environment(CanonicalFamily(alpha),
                                  CanonicalFamily(alpha_tilde), cfg.prior)
                regime = classify_regime(alpha, alpha_tilde).value
                eta = immediate_herd_prob(env, State.HIGH, Action.HIGH, cfg.herd_n)
                xi = immediate_herd_prob(env, State.HIGH, Action.LOW, cfg.herd_n)
                s = run_batch(env, cfg.horizon, cfg.trials, cfg.seed,
                              _DRAW[cfg.state_draw], cfg.workers).summary
                rows.append((alpha, alpha_tilde, regime,
                             s.mean_wrong, s.mean_wrong_ci[0], s.mean_wrong_ci[1],
                             s.frac_wrong_herd, s.frac_wrong_herd_ci[0],
                             s.frac_wrong_herd_ci[1],
                             s.frac_switch_second_half,
                             s.frac_switch_second_half_ci[0],
                             s.frac_switch_second_half_ci[1],
                             eta.lower, xi.lower, ""))
            except Exception as exc:  # keep sweeping; the cell records its error
                failures += 1
                rows.append((alpha, alpha_tilde, "", None, None, None, None, None,
                             None, None, None, None, None, None,
                             f"{type(exc).__name__}: {exc}"))
    _write_csv(cfg.out, ("alpha", "alpha_tilde", "regime",
                         "mean_wrong", "mean_wrong_lo", "mean_wrong_hi",
                         "frac_wrong_herd", "frac_wrong_herd_lo", "frac_wrong_herd_hi",
                         "frac_switch_second_half", "frac_switch_lo", "frac_switch_hi",
                         "eta_lower", "xi_lower", "error"), rows)
    return failures


_MODES = {
    "dist": _mode_dist,
    "path": _mode_path,
    "herdprob": _mode_herdprob,
    "oracle": _mode_oracle,
    "simulate": _mode_simulate,
    "tau": _mode_tau,
    "sweep": _mode_sweep,
}


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, help="true tail exponent")
    p.add_argument("--alpha-tilde", dest="alpha_tilde", type=float,
                   help="perceived tail exponent")
    p.add_argument("--prior", type=float)
    p.add_argument("--horizon", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int,
                   help="defaults to HERDLAB_WORKERS or 1")
    p.add_argument("--config", help="JSON file with config defaults")
    p.add_argument("--out", help="output file path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="herdlab",
        description="numerical experiments for misspecified sequential social learning")
    sub = parser.add_subparsers(dest="mode", required=True)

    p = sub.add_parser("dist", help="tabulate the signal family CDFs")
    p.add_argument("--grid-points", dest="grid_points", type=int)
    _add_common(p)

    p = sub.add_parser("path", help="deterministic high-herd belief path")
    _add_common(p)

    p = sub.add_parser("herdprob", help="certified unbroken-herd probability bounds")
    p.add_argument("--conditioning-state", dest="conditioning_state",
                   choices=("high", "low"))
    p.add_argument("--herd-action", dest="herd_action", choices=("high", "low"))
    _add_common(p)

    p = sub.add_parser("oracle", help="exact enumeration of short action trees")
    p.add_argument("--depth", type=int)
    p.add_argument("--conditioning-state", dest="conditioning_state",
                   choices=("high", "low"))
    _add_common(p)

    p = sub.add_parser("simulate", help="Monte Carlo batch")
    p.add_argument("--state-draw", dest="state_draw",
                   choices=("fixed_high", "fixed_low", "from_prior"))
    p.add_argument("--per-trial-out", dest="per_trial_out",
                   help="also write one CSV row per trial")
    _add_common(p)

    p = sub.add_parser("tau", help="first-matching-action scaling across priors")
    p.add_argument("--priors", type=_float_list)
    _add_common(p)

    p = sub.add_parser("sweep", help="regime grid over exponent pairs")
    p.add_argument("--alpha-list", dest="alpha_list", type=_float_list)
    p.add_argument("--alpha-tilde-list", dest="alpha_tilde_list", type=_float_list)
    p.add_argument("--herd-n", dest="herd_n", type=int)
    _add_common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    mode = args.pop("mode")
    file_path = args.pop("config", None)
    try:
        cfg = build_config(file_path, args)
        if cfg.workers == 1 and args.get("workers") is None:
            cfg.workers = int(os.environ.get("HERDLAB_WORKERS", "1"))
        if cfg.out is None:
            raise ConfigError("field 'out' is required (pass --out)")
        cfg.validate()
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    start = time.perf_counter()
    try:
        failures = _MODES[mode](cfg) or 0
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    _write_sidecar(cfg.out, cfg, mode, time.perf_counter() - start)
    if failures:
        print(f"error: {failures} sweep cell(s) failed; see the error column",
              file=sys.stderr)
        return 1
    return 0
