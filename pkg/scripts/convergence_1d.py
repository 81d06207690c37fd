"""Grid refinement study of the 1D slice bubble.

The ambient is a spherical warped product, h the assembled potential of
the cone/spherical/cone band. Prints the first-variation residual at each
grid spacing and the ratio to the previous one.
"""

import argparse
import math

import numpy as np

from muband.bubble_solver import minimize_1d, warped_band_from_model
from muband.model_spaces import make_spherical, width_of
from muband.potential_assembly import PartitionedBandSpec, assemble, capped_band_models


def setup(n, kappa, d, offset=0.45):
    models, _ = capped_band_models(n, kappa, d)
    spec = PartitionedBandSpec(
        n, tuple(1.1 * width_of(m) for m in models), tuple(m.constant_curvature for m in models),
        H_minus=1e6, H_plus=1e6,
    )
    pot = assemble(spec, models)
    D = pot.length
    amb = make_spherical(n, (math.pi / (n * D)) ** 2, (-offset * D, (1 - offset) * D))

    def h(s):
        return pot.value(np.clip(np.asarray(s) + offset * D, 0, D))

    def dh(s):
        return pot.gradient(np.clip(np.asarray(s) + offset * D, 0, D))

    return amb, h, dh, D


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=3)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--d", type=float, default=0.5)
    ap.add_argument("--levels", type=int, default=6)
    args = ap.parse_args()
    amb, h, dh, D = setup(args.n, args.kappa, args.d)
    prev = None
    print("dt residual residual/(2dt) ratio s_star")
    for k in range(args.levels):
        dt = 1e-2 / 2**k
        band = warped_band_from_model(amb, h, points=int(round(D / dt)) + 1, dh=dh)
        r = minimize_1d(band)
        step = band.t[1] - band.t[0]
        ratio = float("nan") if prev is None else r.residual / prev
        print(f"{step:.3e} {r.residual:.3e} {r.residual / (2 * step):.3e} {ratio:.3f} {r.s_star:.12f}")
        prev = r.residual


if __name__ == "__main__":
    main()
