"""Threshold dimerization delta_T(alpha) by bisection, for several chain lengths."""

import argparse
from pathlib import Path

from ldespin.io import emit
from ldespin.scans import THRESHOLD_COLUMNS, find_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lengths", type=int, nargs="+", default=[12, 16, 20])
    ap.add_argument("--alphas", type=float, nargs="+", default=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7])
    ap.add_argument("--tol", type=float, default=1e-3)
    ap.add_argument("--out", default="results/threshold.csv")
    args = ap.parse_args()

    rows = []
    for L in args.lengths:
        for a in args.alphas:
            res = find_threshold(a, L, tol=args.tol)
            rows.append(res.row())
            print(f"L={L:2d} alpha={a:.2f}  delta_T={res.delta_t}  (+/- {res.bracket_width})")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    emit(rows, THRESHOLD_COLUMNS, "csv", args.out)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
