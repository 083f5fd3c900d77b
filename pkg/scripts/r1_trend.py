"""Decay of the cross-lattice ratio M_{j,alpha}(xi) along parameter paths.

One CSV row per (path, j, xi) with the ratio at every path parameter, followed
by the R2 partial sums with their tail bounds.

    python scripts/r1_trend.py
"""

import csv
import sys

from cardinal_mra import FamilyPath, Gaussian, GeneralizedMultiquadric, Polyharmonic, check_r1, check_r2

PATHS = [
    FamilyPath(Polyharmonic(1, 1), "polyharmonic-order", (1, 2, 3, 4, 6, 8)),
    FamilyPath(GeneralizedMultiquadric(1, 0.5, 1.0), "multiquadric-order", (0.5, 1.5, 2.5, 5.5, 10.5, 20.5)),
    FamilyPath(GeneralizedMultiquadric(1, 0.5, 1.0), "multiquadric-shape", (1.0, 2.0, 4.0, 8.0, 16.0)),
    FamilyPath(Gaussian(1, 1.0), "gaussian", (1.0, 2.0, 4.0, 8.0)),
]


def main() -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["axis", "j", "xi", "values", "verdict"])
    for path in PATHS:
        for j, xi, vals, ok in check_r1(path).rows:
            w.writerow([path.axis, j[0], f"{xi[0]:.6f}", " ".join(f"{v:.6e}" for v in vals),
                        "pass" if ok else "fail"])
    w.writerow([])
    w.writerow(["axis", "radius", "partial_sum", "tail_bound", "cauchy"])
    for path in PATHS:
        entries, ok = check_r2(path)
        for e in entries:
            w.writerow([path.axis, e.radius, repr(e.partial_sum), repr(e.tail_bound), ok])


if __name__ == "__main__":
    main()
