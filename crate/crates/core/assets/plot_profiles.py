#!/usr/bin/env python3
"""Plot data profiles written by `stodars profile` or `stodars bench`.

Usage: python3 plot_profiles.py [DIR]

Reads every profile_tau*.csv in DIR (default: the script's directory) and
writes a matching PNG next to it.
"""
import csv
import glob
import os
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    curves = defaultdict(list)
    with open(path, newline="") as f:
        for row in csv.DictReader(f):
            curves[row["solver"]].append((float(row["normalized_budget"]), float(row["fraction"])))
    return curves


def main():
    root = sys.argv[1] if len(sys.argv) > 1 else os.path.dirname(os.path.abspath(__file__))
    paths = sorted(glob.glob(os.path.join(root, "profile_tau*.csv")))
    if not paths:
        sys.exit(f"no profile_tau*.csv in {root}")
    for path in paths:
        tau = os.path.basename(path)[len("profile_tau"):-len(".csv")]
        fig, ax = plt.subplots(figsize=(6, 4))
        for solver, pts in sorted(load(path).items()):
            pts.sort()
            ax.step([p[0] for p in pts], [p[1] for p in pts], where="post", label=solver)
        ax.set_xlabel("noisy evaluations / (n + 1)")
        ax.set_ylabel("fraction of instances solved")
        ax.set_ylim(0, 1.02)
        ax.set_title(f"data profile, tau = {tau}")
        ax.legend(loc="lower right")
        fig.tight_layout()
        out = path[:-4] + ".png"
        fig.savefig(out, dpi=120)
        print(out)


if __name__ == "__main__":
    main()
