#!/usr/bin/env python3
"""Generate the seeded CSV/JSON inputs the plotting package renders from.

Everything here goes through the persisted interfaces (sweep CSV, info
JSON, small derived CSVs), so the figures never need this package at
render time.
"""

import argparse
import csv
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from macresolve import induced_joint, load_channel
from macresolve.cli import main as cli_main
from macresolve.experiments import ExperimentConfig, run_tv_sweep, write_results
from macresolve.info import density_moments, mutual_informations
from macresolve.resolvability import (
    first_order_certificate,
    second_order_eps_prime,
)

SEED = 20240817


def decay_fixture(channel_path: str, dest: Path) -> None:
    """One sweep per rate pair, concatenated; R columns separate the curves."""
    ch = load_channel(channel_path)
    records = []
    for r1, r2 in ((0.85, 0.45), (0.30, 0.45)):
        cfg = ExperimentConfig(
            channel=ch, n_list=(2, 4, 6), trials=20, seed=SEED, r1=r1, r2=r2
        )
        records += run_tv_sweep(cfg)
    write_results(records, dest)
    print(f"decay: {len(records)} records -> {dest}")


def info_fixture(channel_path: str, dest: Path) -> None:
    code = cli_main(["info", "--channel", channel_path, "--out", str(dest)])
    if code != 0:
        raise SystemExit(f"info fixture failed with exit code {code}")
    print(f"region: info JSON -> {dest}")


def epsprime_fixture(channel_path: str, dest: Path) -> None:
    joint = induced_joint(load_channel(channel_path))
    m1 = density_moments(joint, "conditional-x-given-y")
    m2 = density_moments(joint, "marginal-y")
    eps, d = 0.1, 0.25
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("n", "eps", "epsPrime1", "epsPrime2"))
        for k in range(2, 13):
            n = 2**k
            writer.writerow(
                (
                    n,
                    repr(eps),
                    repr(second_order_eps_prime(m1, eps, d, n)),
                    repr(second_order_eps_prime(m2, eps, d, n)),
                )
            )
    print(f"epsprime: 11 rows -> {dest}")


def bounds_fixture(channel_path: str, dest: Path) -> None:
    ch = load_channel(channel_path)
    iq = mutual_informations(induced_joint(ch))
    rows = []
    for n in (25, 50, 75, 100, 150, 200):
        rep = first_order_certificate(iq, 0.85, 0.45, n, ch.sizeY, ch.sizeZ)
        value = "" if not math.isfinite(rep.value) else repr(rep.value)
        rows.append((n, "first", value, repr(rep.threshold), int(rep.vacuous)))
    with open(dest, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("n", "kind", "value", "threshold", "vacuous"))
        writer.writerows(rows)
    print(f"bounds: {len(rows)} rows -> {dest}")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    root = Path(__file__).resolve().parent.parent
    ap.add_argument("--adder", default=str(root / "channels" / "adder.json"))
    ap.add_argument("--noisy", default=str(root / "channels" / "noisy_adder.json"))
    ap.add_argument("--dest", default=str(root / "plots" / "fixtures"))
    args = ap.parse_args()

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    decay_fixture(args.adder, dest / "decay_adder.csv")
    info_fixture(args.adder, dest / "adder_info.json")
    epsprime_fixture(args.noisy, dest / "epsprime_noisy.csv")
    bounds_fixture(args.adder, dest / "bounds_adder.csv")
    return 0


if __name__ == "__main__":
    sys.exit(main())
