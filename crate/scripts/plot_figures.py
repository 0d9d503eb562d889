#!/usr/bin/env python3
"""Plot threshold curves and entanglement-of-formation surfaces from gmps CSV output.

    gmps thresholds --x 1.1:5:40 --bond inf -o th_inf.csv
    gmps thresholds --x 1.1:5:40 --bond 1.1 -o th_r.csv
    gmps scan-eof --x 1:5:21 --d 0:5:21 -o eof.csv
    python3 scripts/plot_figures.py --thresholds th_inf.csv th_r.csv --eof eof.csv -o figs
"""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLES = {1: ("tab:red", "-"), 2: ("tab:green", "--"), 3: ("tab:blue", ":")}


def read_rows(path):
    with open(path, newline="") as f:
        return [row for row in csv.DictReader(line for line in f if not line.startswith("#"))]


def plot_thresholds(paths, out_dir):
    fig, axes = plt.subplots(1, len(paths), figsize=(4.5 * len(paths), 4), squeeze=False)
    for ax, path in zip(axes[0], paths):
        curves = defaultdict(list)
        for row in read_rows(path):
            if row["s_k"]:
                curves[int(row["k"])].append((float(row["x"]), float(row["s_k"])))
        for k, pts in sorted(curves.items()):
            color, ls = STYLES.get(k, ("k", "-."))
            xs, ss = zip(*pts)
            ax.plot(xs, ss, color=color, linestyle=ls, label=f"k = {k}")
        ax.set_xlabel("x")
        ax.set_ylabel("s_k")
        ax.set_title(Path(path).stem)
        ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "thresholds.png", dpi=150)


def plot_eof(path, out_dir):
    grid = defaultdict(dict)
    for row in read_rows(path):
        grid[int(row["k"])][(float(row["x"]), float(row["d"]))] = float(row["eof"])
    ks = sorted(grid)
    fig = plt.figure(figsize=(4.5 * len(ks), 4))
    for i, k in enumerate(ks):
        ax = fig.add_subplot(1, len(ks), i + 1, projection="3d")
        xs = sorted({x for x, _ in grid[k]})
        ds = sorted({d for _, d in grid[k]})
        X, D = np.meshgrid(xs, ds)
        z = np.array([[grid[k][(x, d)] for x in xs] for d in ds])
        ax.plot_surface(X, D, z, cmap="viridis")
        ax.set_xlabel("x")
        ax.set_ylabel("d")
        ax.set_zlabel("E_F")
        ax.set_title(f"|i - j| = {k}")
    fig.tight_layout()
    fig.savefig(out_dir / "eof.png", dpi=150)


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--thresholds", nargs="*", default=[], help="CSV files from 'gmps thresholds'")
    parser.add_argument("--eof", help="CSV file from 'gmps scan-eof'")
    parser.add_argument("-o", "--out-dir", default=".", type=Path)
    args = parser.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    if args.thresholds:
        plot_thresholds(args.thresholds, args.out_dir)
    if args.eof:
        plot_eof(args.eof, args.out_dir)


if __name__ == "__main__":
    main()
