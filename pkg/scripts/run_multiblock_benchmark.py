#!/usr/bin/env python3
"""Repeated sequential updates vs one offline fit of the whole archive.

Splits a 40-date stack into blocks (30, 5, 5) and estimates the final
block's phases three ways: one offline fit of all dates, one sequential fit
given an offline fit of the first 35, and a cascaded run that bootstraps
from the first 30 dates and applies the sequential solver block by block.
Prints the three arms' MSE per sample size.

Usage: python3 scripts/run_multiblock_benchmark.py [--trials 200]
"""

import argparse
import csv
import sys
from pathlib import Path

from seqlink.cli import main as seqlink_main

CONFIG_TEMPLATE = """\
# cascaded sequential updates vs offline, phase-only plug-in
l = 40
p = 35
k = 5
rho = 0.98
distribution = gaussian
estimator = po
distance = frob
mode = multiblock
sizes = 30, 5, 5
n_grid = {n_grid}
trials = {trials}
master_seed = 17
"""


def print_comparison(rows: list[dict]) -> None:
    by_key = {(r["mode"], int(r["n"])): r for r in rows}
    sizes = sorted({int(r["n"]) for r in rows})
    arms = ("offline", "sequential", "chained")
    print(f"\nfinal-block MSE, split 30/5/5, phase-only + Frobenius, "
          f"{rows[0]['trials']} trials")
    header = "  ".join(f"{arm:>22}" for arm in arms)
    print(f"  {'n':>5}  {header}")
    for n in sizes:
        cells = []
        for arm in arms:
            row = by_key[(arm, n)]
            cells.append(f"{float(row['mse']):.4e} +/- {2 * float(row['stderr']):.1e}")
        print(f"  {n:>5}  " + "  ".join(f"{c:>22}" for c in cells))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--n-grid", default="45, 64, 90, 128")
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--threads", type=int, default=4)
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = out_dir / "multiblock.cfg"
    config.write_text(CONFIG_TEMPLATE.format(n_grid=args.n_grid,
                                             trials=args.trials))
    out_csv = out_dir / "multiblock.csv"

    code = seqlink_main(["bench", str(config), "--out", str(out_csv),
                         "--threads", str(args.threads)])
    if code != 0:
        return code
    with open(out_csv, newline="") as fh:
        print_comparison(list(csv.DictReader(fh)))
    print(f"\nfull table: {out_csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
