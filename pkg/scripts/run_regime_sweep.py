#!/usr/bin/env python3
"""Sweep the misperception grid and simulate one batch per regime.

Writes sweep.csv plus one summary/trials pair per exponent cell into the
output directory. Deterministic for a fixed seed; rerunning overwrites
with identical payload bytes.
"""

import argparse
import sys
from pathlib import Path

from herdlab.cli import main as herdlab

CELLS = ((2.0, 1.5), (2.0, 2.0), (2.0, 2.5), (2.0, 3.0), (2.0, 3.2))


def run(argv):
    rc = herdlab([str(a) for a in argv])
    if rc != 0:
        sys.exit(rc)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="out/sweep")
    ap.add_argument("--trials", type=int, default=4000)
    ap.add_argument("--horizon", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    tildes = ",".join(str(c[1]) for c in CELLS)
    run(["sweep", "--alpha-list", "2.0", "--alpha-tilde-list", tildes,
         "--trials", args.trials, "--horizon", args.horizon,
         "--seed", args.seed, "--workers", args.workers,
         "--out", out / "sweep.csv"])

    for alpha, alpha_tilde in CELLS:
        tag = f"a{alpha}_at{alpha_tilde}"
        run(["simulate", "--alpha", alpha, "--alpha-tilde", alpha_tilde,
             "--trials", args.trials, "--horizon", args.horizon,
             "--seed", args.seed, "--workers", args.workers,
             "--out", out / f"summary_{tag}.json",
             "--per-trial-out", out / f"trials_{tag}.csv"])

    print(f"wrote {out}/sweep.csv and per-cell batches for {len(CELLS)} cells")


if __name__ == "__main__":
    main()
