"""Width bounds as a function of the core width d, one table per n.

Columns: d/d_max, classical bound, ell for scal >= 0, and ell for a few
sigma as fractions of the admissible threshold. Writes gnuplot-ready .dat
files when --out is given.
"""

import argparse
from pathlib import Path

import numpy as np

from muband.comparison import classical_bound, ell_negative, ell_nonneg, negative_threshold


def table(n, kappa, fractions, sigma_fractions):
    dmax = classical_bound(n, kappa)
    rows = []
    for f in fractions:
        d = f * dmax
        row = [f, d, dmax, ell_nonneg(n, kappa, d).value]
        thr = negative_threshold(n, kappa, d)
        row += [ell_negative(n, kappa, s * thr, d).value for s in sigma_fractions]
        rows.append(row)
    return np.array(rows)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=19)
    ap.add_argument("--out")
    args = ap.parse_args()
    fractions = np.linspace(0.05, 0.95, args.points)
    sig = [0.1, 0.5, 0.9]
    head = "d/dmax d dmax ell_nonneg " + " ".join(f"ell_neg@{s}" for s in sig)
    for n in range(2, 8):
        t = table(n, args.kappa, fractions, sig)
        print(f"# n = {n}\n# {head}")
        for r in t:
            print(" ".join(f"{v:.6g}" for v in r))
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            np.savetxt(Path(args.out) / f"width_n{n}.dat", t, fmt="%.17g", header=head)


if __name__ == "__main__":
    main()
