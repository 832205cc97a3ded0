#!/usr/bin/env python3
"""Exact TV decay versus block length for one channel and rate pair.

Writes the per-trial sweep CSV and prints a median/quartile table, so a
rate pair above the corner point can be compared against one below it.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from macresolve import load_channel
from macresolve.experiments import ExperimentConfig, run_tv_sweep, write_results


def summarize(records, n_list):
    print(f"{'n':>4} {'median':>10} {'q25':>10} {'q75':>10} {'M1':>6} {'M2':>6}")
    for n in n_list:
        tvs = [r.tv for r in records if r.n == n]
        rec = next(r for r in records if r.n == n)
        q25, med, q75 = np.percentile(tvs, (25, 50, 75))
        print(f"{n:>4} {med:>10.4f} {q25:>10.4f} {q75:>10.4f} {rec.m1:>6} {rec.m2:>6}")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--channel", required=True, help="channel JSON file")
    ap.add_argument("--n", default="2,4,6,8", help="comma-separated block lengths")
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=20240817)
    ap.add_argument("--r1", type=float, default=0.85)
    ap.add_argument("--r2", type=float, default=0.45)
    ap.add_argument("--eps1", type=float, default=0.1)
    ap.add_argument("--eps2", type=float, default=0.1)
    ap.add_argument("--out", required=True, help="destination CSV")
    args = ap.parse_args()

    n_list = tuple(int(part) for part in args.n.split(",") if part.strip())
    cfg = ExperimentConfig(
        channel=load_channel(args.channel),
        n_list=n_list,
        trials=args.trials,
        seed=args.seed,
        r1=args.r1,
        r2=args.r2,
        eps1=args.eps1,
        eps2=args.eps2,
    )
    records = run_tv_sweep(cfg)
    write_results(records, args.out)
    print(f"(R1, R2) = ({args.r1:g}, {args.r2:g}), {args.trials} trials per n")
    summarize(records, n_list)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
