#!/usr/bin/env python3
"""Wall-time scaling of the sequential update vs a full offline re-fit.

For each past-archive size p, times one sequential solve of k new dates
(past factors already available) against one offline solve of all p+k
dates, both at a fixed iteration count, and reports medians.

Usage: python3 scripts/run_timing_benchmark.py [--p-grid 50,100,200,400] [--k 5]
"""

import argparse
import sys
from pathlib import Path

from seqlink.bench import timing_experiment

HEADER = "p,k,distance,seq_ms,offline_ms,ratio"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p-grid", default="50,100,200,400")
    parser.add_argument("--k", type=int, default=5)
    parser.add_argument("--reps", type=int, default=7)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()

    p_grid = [int(tok) for tok in args.p_grid.split(",")]
    lines = [HEADER]
    print(f"median of {args.reps} runs, k = {args.k} new dates")
    print(f"  {'p':>6} {'distance':>9} {'seq ms':>10} {'offline ms':>11} {'ratio':>7}")
    for p in p_grid:
        for distance in ("kl", "frob"):
            res = timing_experiment(p, args.k, distance, reps=args.reps)
            ratio = res["seq_ms"] / res["offline_ms"]
            print(f"  {p:>6} {distance:>9} {res['seq_ms']:>10.3f} "
                  f"{res['offline_ms']:>11.3f} {ratio:>7.3f}")
            lines.append(f"{p},{args.k},{distance},{res['seq_ms']!r},"
                         f"{res['offline_ms']!r},{ratio!r}")

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_csv = out_dir / "timing.csv"
    out_csv.write_text("\n".join(lines) + "\n")
    print(f"\nfull table: {out_csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
