"""Improvement of the arithmetic over the constant schedule across (cq, cs).

Writes the sweep CSV and prints a coarse text map of c_const - c_arith.
Axis ranges are a guess; pass --cq-steps/--cs-steps for a finer grid.

    python3 scripts/improvement_sweep.py --out sweep.csv --workers 4
"""
import argparse
import csv
import sys

from bkwsieve.cli import SweepGrid, run_sweep, write_rows
from bkwsieve.core import Scenario


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="sweep.csv")
    ap.add_argument("--cq-steps", type=int, default=9)
    ap.add_argument("--cs-steps", type=int, default=9)
    ap.add_argument("--compute", default="classical")
    ap.add_argument("--samples", default="exponential")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    grid = SweepGrid(1.0, 3.0, args.cq_steps, 0.55, 2.95, args.cs_steps,
                     Scenario(args.compute, args.samples))
    rows = run_sweep(grid, args.workers)
    with open(args.out, "w", newline="") as fh:
        write_rows(rows, fh)

    imp = {(r["cq"], r["cs"]): r["exponent"] for r in rows if r["algorithm"] == "improvement"}
    cqs = sorted({r["cq"] for r in rows})
    css = sorted({r["cs"] for r in rows})
    print("improvement x 1e3 (rows cq, columns cs; '.' = invalid or infeasible)")
    print("   cq \\ cs " + " ".join(f"{cs:6.2f}" for cs in css))
    for cq in cqs:
        cells = [f"{imp[cq, cs] * 1e3:6.2f}" if (cq, cs) in imp else "     ." for cs in css]
        print(f"{cq:10.2f} " + " ".join(cells))
    worst = min(imp.values(), default=float("nan"))
    print(f"min improvement {worst:.2e} over {len(imp)} points; CSV in {args.out}")
    return 0 if worst >= -1e-6 else 1


if __name__ == "__main__":
    sys.exit(main())
