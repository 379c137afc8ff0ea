"""Run every reproduction and write CSV/JSON reports.

    python scripts/reproduce_all.py --out results --seed 42
"""

import argparse
import sys

from genut import bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--format", choices=("csv", "json", "both"), default="both")
    args = ap.parse_args()
    ok = True
    for sel in bench.SELECTORS:
        rep = bench.reproduce(sel, seed=args.seed, out=args.out, fmt=args.format)
        ok &= rep.passed
        n_fail = len(rep.failures())
        print(f"{sel:15s} {'PASS' if rep.passed else 'FAIL'}  {len(rep.rows):4d} rows  {n_fail} failing  {rep.runtime_s:6.2f} s")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
