#!/usr/bin/env python3
"""Belief paths, certified herd-probability brackets, and tau scaling.

Produces, for one true exponent and a list of perceived exponents:
path_<tag>.csv (deterministic herd-path log-odds), bounds_<tag>.csv
(herd-probability brackets at decade truncations), and a shared tau.csv
(mean first-matching-action time against prior odds).
"""

import argparse
import sys
from pathlib import Path

from herdlab.cli import main as herdlab


def run(argv):
    rc = herdlab([str(a) for a in argv])
    if rc != 0:
        sys.exit(rc)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="out/convergence")
    ap.add_argument("--alpha", type=float, default=2.0)
    ap.add_argument("--alpha-tildes", default="1.5,2.5,3.2")
    ap.add_argument("--horizon", type=int, default=100_000)
    ap.add_argument("--tau-alpha-tilde", type=float, default=2.5)
    ap.add_argument("--tau-trials", type=int, default=3000)
    ap.add_argument("--tau-horizon", type=int, default=3000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    for tilde in (float(t) for t in args.alpha_tildes.split(",")):
        tag = f"a{args.alpha}_at{tilde}"
        run(["path", "--alpha", args.alpha, "--alpha-tilde", tilde,
             "--horizon", args.horizon, "--out", out / f"path_{tag}.csv"])
        run(["herdprob", "--alpha", args.alpha, "--alpha-tilde", tilde,
             "--horizon", args.horizon, "--out", out / f"bounds_{tag}.csv"])

    # the odds scaling law is a mild-condescension statement, so tau gets
    # its own exponent rather than reusing the path list
    run(["tau", "--alpha", args.alpha, "--alpha-tilde", args.tau_alpha_tilde,
         "--priors", "0.5,0.2,0.1,0.05",
         "--trials", args.tau_trials, "--horizon", args.tau_horizon,
         "--seed", args.seed, "--workers", args.workers,
         "--out", out / "tau.csv"])

    print(f"wrote paths, brackets, and tau.csv under {out}")


if __name__ == "__main__":
    main()
