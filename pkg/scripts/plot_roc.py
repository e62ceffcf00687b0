#!/usr/bin/env python3
"""Plot ROC curves from a roc.csv written by ``loojam roc`` or ``loojam sweep``.

Needs matplotlib (``pip install loojam[plot]``).
Usage: python scripts/plot_roc.py runs/sweep/roc.csv --out roc.png
"""
import argparse
import csv
import math
import sys
from collections import defaultdict


def read_curves(path):
    curves = defaultdict(list)
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            pd = float(row["p_d"])
            if math.isnan(pd):
                continue
            curves[int(row["n"])].append((float(row["p_f"]), pd))
    return {n: sorted(pts) for n, pts in sorted(curves.items())}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("roc_csv")
    ap.add_argument("--out", default="roc.png")
    ap.add_argument("--title", default="")
    args = ap.parse_args()
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib is required: pip install 'loojam[plot]'", file=sys.stderr)
        return 2
    curves = read_curves(args.roc_csv)
    if not curves:
        print(f"no ROC points in {args.roc_csv}", file=sys.stderr)
        return 1
    fig, ax = plt.subplots(figsize=(5, 5))
    for n, pts in curves.items():
        xs = [0.0] + [p[0] for p in pts] + [1.0]
        ys = [0.0] + [p[1] for p in pts] + [1.0]
        ax.plot(xs, ys, marker=".", label=f"N = {n}")
    ax.plot([0, 1], [0, 1], "k:", lw=0.8, label="chance")
    ax.set_xlabel("P_F")
    ax.set_ylabel("P_D")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    if args.title:
        ax.set_title(args.title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)
    print(args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
