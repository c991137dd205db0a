"""Plot the empirical CDFs written by ``ris-mumimo simulate``.

    python3 scripts/plot_cdf.py results/ [--save cdf.png]

Needs matplotlib (``pip install artifact[plot]``).
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np


def main():
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("out", type=Path)
    parser.add_argument("--save", type=Path)
    args = parser.parse_args()

    fig, ax = plt.subplots(figsize=(6, 4))
    for dat in sorted(args.out.glob("cdf_*.dat")):
        rows = np.loadtxt(dat, ndmin=2)
        ax.step(rows[:, 0], rows[:, 1], where="post", label=dat.stem.removeprefix("cdf_"))
    ax.axhline(0.5, color="grey", lw=0.5, ls=":")
    ax.set_xlabel("sum rate [bit/s/Hz]")
    ax.set_ylabel("CDF")
    ax.legend(fontsize=8)
    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
