#!/usr/bin/env python3
"""Sequential vs offline accuracy as the sample support grows.

Writes a bench config (Gaussian stack, SCM plug-in, both fitting distances,
both processing modes), runs it through the CLI, and prints an offline vs
sequential comparison per sample size with +/-2 stderr bands.

Usage: python3 scripts/run_sample_size_benchmark.py [--trials 200] [--out-dir results]
"""

import argparse
import csv
import sys
from pathlib import Path

from seqlink.cli import main as seqlink_main

CONFIG_TEMPLATE = """\
# sequential vs offline, Gaussian data, SCM plug-in
l = 40
p = 35
k = 5
rho = 0.98
distribution = gaussian
estimator = scm
n_grid = 45, 64, 90, 128
trials = {trials}
master_seed = 11

[experiment]
distance = kl
mode = offline

[experiment]
distance = kl
mode = sequential

[experiment]
distance = frob
mode = offline

[experiment]
distance = frob
mode = sequential
"""


def load_rows(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def print_comparison(rows: list[dict]) -> None:
    by_key = {(r["distance"], r["mode"], int(r["n"])): r for r in rows}
    distances = sorted({r["distance"] for r in rows})
    sizes = sorted({int(r["n"]) for r in rows})
    for distance in distances:
        print(f"\n{distance} distance (SCM plug-in, {rows[0]['trials']} trials)")
        print(f"  {'n':>5}  {'offline mse':>12}  {'sequential mse':>14}  bands")
        for n in sizes:
            off = by_key[(distance, "offline", n)]
            seq = by_key[(distance, "sequential", n)]
            o_mse, o_se = float(off["mse"]), float(off["stderr"])
            s_mse, s_se = float(seq["mse"]), float(seq["stderr"])
            overlap = abs(o_mse - s_mse) <= 2 * o_se + 2 * s_se
            verdict = "overlap" if overlap else "APART"
            print(f"  {n:>5}  {o_mse:>12.4e}  {s_mse:>14.4e}  {verdict}")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--threads", type=int, default=4)
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = out_dir / "sample_size.cfg"
    config.write_text(CONFIG_TEMPLATE.format(trials=args.trials))
    out_csv = out_dir / "sample_size.csv"

    code = seqlink_main(["bench", str(config), "--out", str(out_csv),
                         "--threads", str(args.threads)])
    if code != 0:
        return code
    print_comparison(load_rows(out_csv))
    print(f"\nfull table: {out_csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
