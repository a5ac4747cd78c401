#!/usr/bin/env python3
"""Render report figures from the simulation CLI's CSV outputs.

Reads only the documented CSV schemas (plus the optional metadata sidecar
sitting next to the input) and writes a PNG. A fixed style sheet, explicit
axis limits, and stripped image metadata make rendering deterministic:
the same input file produces byte-identical output.

Kinds:
    phase        sweep CSV      regime map over the exponent grid
    path_loglog  path CSV       herd-path convergence on log-log axes
    wrong_count  per-trial CSV  histogram of wrong actions per trial
    tau_scaling  tau CSV        mean first-matching time vs prior odds
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_STYLE = Path(__file__).with_name("report.mplstyle")

REGIME_COLORS = {
    "AntiCondescending": "#d62728",
    "BoundaryZero": "#ff7f0e",
    "EfficientWindow": "#2ca02c",
    "BoundaryOne": "#9467bd",
    "OverCondescending": "#1f77b4",
}
# boundary lines get their own colors so probing an image can tell them apart
BOUNDARY_EQUAL_COLOR = "#8c564b"
BOUNDARY_PLUS_ONE_COLOR = "#e377c2"

_SCHEMAS = {
    "phase": ("alpha", "alpha_tilde", "regime",
              "mean_wrong", "mean_wrong_lo", "mean_wrong_hi",
              "frac_wrong_herd", "frac_wrong_herd_lo", "frac_wrong_herd_hi",
              "frac_switch_second_half", "frac_switch_lo", "frac_switch_hi",
              "eta_lower", "xi_lower", "error"),
    "path_loglog": ("n", "r_h", "r_tilde_h", "one_minus_pi_tilde_h"),
    "wrong_count": ("trial", "seed", "realized_state", "wrong_count", "tau",
                    "first_wrong_index", "last_wrong_index", "last_switch_index",
                    "bad_run_count", "bad_run_lengths", "final_one_minus_pi_tilde",
                    "herded_correct", "wrong_herd_proxy", "wrong_herd_proxy_strict"),
    "tau_scaling": ("prior", "n_trials", "mean_tau", "tau_ci_lo", "tau_ci_hi",
                    "frac_not_reached", "prior_odds_against", "ratio_to_odds"),
}


class SchemaError(ValueError):
    """Input file does not match the documented schema for the kind."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    plot_kind: str
    output_image: str


def _read_rows(path: str, kind: str) -> list:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or ()
        missing = [col for col in _SCHEMAS[kind] if col not in header]
        if missing:
            raise SchemaError(f"{path} does not match the {kind} input schema; "
                              f"missing columns: {', '.join(missing)}")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path} has no data rows")
    return rows


def _opt_float(text: str):
    return None if text == "" else float(text)


def _sidecar_config(csv_path: str, key: str):
    try:
        with open(csv_path + ".meta.json") as fh:
            return json.load(fh)["config"][key]
    except (OSError, ValueError, KeyError):
        return None


def _render_phase(rows, ax, input_csv) -> dict:
    plotted = 0
    failed = 0
    seen = set()
    for row in rows:
        regime = row["regime"]
        if regime == "":
            failed += 1
            continue
        if regime not in REGIME_COLORS:
            raise SchemaError(f"unknown regime label {regime!r} in {input_csv}")
        ax.scatter([float(row["alpha"])], [float(row["alpha_tilde"])],
                   marker="s", s=900, color=REGIME_COLORS[regime],
                   edgecolors="none", zorder=3)
        plotted += 1
        seen.add(regime)
    if plotted == 0:
        raise SchemaError(f"{input_csv} has no successful cells to draw")

    alphas = [float(r["alpha"]) for r in rows if r["regime"]]
    tildes = [float(r["alpha_tilde"]) for r in rows if r["regime"]]
    x0, x1 = min(alphas) - 0.6, max(alphas) + 0.6
    y0 = min(min(tildes), x0) - 0.3
    y1 = max(max(tildes), x1 + 1.0) + 0.3
    ax.plot([x0, x1], [x0, x1], color=BOUNDARY_EQUAL_COLOR, lw=2.2, zorder=2)
    ax.plot([x0, x1], [x0 + 1.0, x1 + 1.0], color=BOUNDARY_PLUS_ONE_COLOR,
            lw=2.2, zorder=2)
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_xlabel("true exponent alpha")
    ax.set_ylabel("perceived exponent alpha_tilde")
    ax.set_title("learning regimes over the exponent grid")
    return {
        "cells": plotted,
        "failed_cells": failed,
        "regimes": sorted(seen),
        "colors": {label: REGIME_COLORS[label] for label in sorted(seen)},
        "xlim": [x0, x1],
        "ylim": [y0, y1],
    }


def _render_path_loglog(rows, ax, input_csv) -> dict:
    n = np.array([float(r["n"]) for r in rows])
    comp = np.array([float(r["one_minus_pi_tilde_h"]) for r in rows])
    ax.loglog(n, comp, color="#1f77b4", lw=1.6,
              label="perceived mass on the wrong state")

    # slope over the last two decades, where the power law has set in
    window = n >= n[-1] / 100.0
    slope, _ = np.polyfit(np.log(n[window]), np.log(comp[window]), 1)

    alpha_tilde = _sidecar_config(input_csv, "alpha_tilde")
    reference = None
    if alpha_tilde:
        reference = -1.0 / float(alpha_tilde)
        nw, cw = n[window], comp[window]
        ax.loglog(nw, cw[0] * (nw / nw[0]) ** reference, "--",
                  color="#d62728", lw=1.4, label=f"slope {reference:g} reference")
        ax.legend()

    ax.set_xlabel("agents n")
    ax.set_ylabel("1 - perceived belief in the true state")
    ax.set_title("herd-path convergence")
    return {
        "points": int(n.size),
        "fitted_slope": float(slope),
        "fit_window": [float(n[window][0]), float(n[-1])],
        "reference_slope": reference,
    }


def _render_wrong_count(rows, ax, input_csv) -> dict:
    counts = np.array([int(r["wrong_count"]) for r in rows])
    bins = np.arange(0, counts.max() + 2) - 0.5
    ax.hist(counts, bins=bins, color="#2ca02c", edgecolor="white", lw=0.5)
    ax.set_xlabel("wrong actions per trial")
    ax.set_ylabel("trials")
    ax.set_title(f"wrong-action distribution over {counts.size} trials")
    return {
        "trials": int(counts.size),
        "mean_wrong": float(counts.mean()),
        "max_wrong": int(counts.max()),
    }


def _render_tau_scaling(rows, ax, input_csv) -> dict:
    priors, odds, mean, err_lo, err_hi = [], [], [], [], []
    skipped = 0
    for row in rows:
        mt = _opt_float(row["mean_tau"])
        if mt is None:
            skipped += 1
            continue
        lo = _opt_float(row["tau_ci_lo"])
        hi = _opt_float(row["tau_ci_hi"])
        priors.append(float(row["prior"]))
        odds.append(float(row["prior_odds_against"]))
        mean.append(mt)
        err_lo.append(mt - lo if lo is not None else 0.0)
        err_hi.append(hi - mt if hi is not None else 0.0)
    if not mean:
        raise SchemaError(f"{input_csv} has no rows with a reached matching action")

    ax.errorbar(odds, mean, yerr=[err_lo, err_hi], fmt="o", color="#9467bd",
                capsize=3, label="measured")
    ref = [mean[0] / odds[0] * x for x in odds]
    ax.plot(odds, ref, "--", color="#ff7f0e", lw=1.4,
            label="proportional to the odds")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.legend()
    ax.set_xlabel("prior odds against the true state")
    ax.set_ylabel("mean first matching action")
    ax.set_title("first-matching-action scaling")
    return {
        "priors": priors,
        "ratio_to_odds": [float(row["ratio_to_odds"]) for row in rows
                          if row["ratio_to_odds"] != ""],
        "skipped_rows": skipped,
    }


_RENDERERS = {
    "phase": _render_phase,
    "path_loglog": _render_path_loglog,
    "wrong_count": _render_wrong_count,
    "tau_scaling": _render_tau_scaling,
}


def render(spec: PlotSpec) -> dict:
    """Write the image for `spec` and return a summary of what was drawn."""
    if spec.plot_kind not in _RENDERERS:
        raise ValueError(f"unknown plot kind {spec.plot_kind!r}; "
                         f"choose from {', '.join(sorted(_RENDERERS))}")
    rows = _read_rows(spec.input_csv, spec.plot_kind)
    with plt.style.context(str(_STYLE)):
        fig, ax = plt.subplots()
        try:
            summary = _RENDERERS[spec.plot_kind](rows, ax, spec.input_csv)
            fig.savefig(spec.output_image, metadata={"Software": None})
        finally:
            plt.close(fig)
    summary["kind"] = spec.plot_kind
    summary["output"] = spec.output_image
    return summary


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="plots.py",
        description="render report figures from the simulation CLI's CSV outputs")
    ap.add_argument("--kind", required=True, choices=sorted(_RENDERERS))
    ap.add_argument("--in", dest="input_csv", required=True, metavar="CSV")
    ap.add_argument("--out", dest="output_image", required=True, metavar="PNG")
    args = ap.parse_args(argv)
    try:
        summary = render(PlotSpec(args.input_csv, args.kind, args.output_image))
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(summary, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
