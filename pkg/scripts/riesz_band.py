"""Observed range of the Riesz ratio Q on [-pi, pi] against the certified upper constant.

    python scripts/riesz_band.py [--grid 4097]
"""

import argparse
import csv
import sys

import numpy as np

from cardinal_mra import (
    Gaussian,
    GeneralizedMultiquadric,
    Polyharmonic,
    riesz_upper_constant,
    symbol_values,
)

FAMILIES = [
    Polyharmonic(1, 1),
    Polyharmonic(1, 2),
    Polyharmonic(1, 4),
    GeneralizedMultiquadric(1, 0.5, 1.0),
    GeneralizedMultiquadric(1, 2.5, 1.0),
    GeneralizedMultiquadric(1, 0.5, 4.0),
    Gaussian(1, 1.0),
    Gaussian(1, 4.0),
]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=4097)
    args = ap.parse_args()

    grid = np.linspace(-np.pi, np.pi, args.grid)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["family", "q_min", "q_max", "argmax", "upper_constant", "slack"])
    for phi in FAMILIES:
        q = symbol_values(phi, grid, "riesz-ratio", 1e-12)
        upper = riesz_upper_constant(phi)
        w.writerow([phi.label(), repr(float(q.min())), repr(float(q.max())),
                    repr(float(grid[np.argmax(q)])), repr(upper), repr(upper - float(q.max()))])


if __name__ == "__main__":
    main()
