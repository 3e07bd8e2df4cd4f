#!/usr/bin/env python3
"""Plot the CSV curves written by `yardstick run`.

usage: plot.py OUTPUT_DIR [--save FILE]
"""
import argparse
import csv
import pathlib

import matplotlib.pyplot as plt


def read(path):
    with open(path, newline="") as f:
        rows = csv.reader(f)
        header = next(rows)
        cols = list(zip(*[[float(x) for x in r] for r in rows]))
    return header, cols


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir", type=pathlib.Path)
    ap.add_argument("--save")
    args = ap.parse_args()

    files = sorted(args.outdir.glob("*.csv"))
    fig, ax = plt.subplots(figsize=(8, 5))
    for f in files:
        header, cols = read(f)
        for name, col in zip(header[1:], cols[1:]):
            ax.plot(cols[0], col, label=f"{f.stem}:{name}", lw=1)
    ax.set_xlabel(header[0])
    ax.legend(fontsize="small")
    if args.save:
        fig.savefig(args.save, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
