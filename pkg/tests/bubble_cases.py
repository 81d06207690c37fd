"""Shared random instance generators for the bubble solver tests."""

import numpy as np

from muband.bubble_solver import GridBand2D


def random_grid(rng, topology=None, max_interior=16, quantum=None, scale=3.0):
    topology = topology or rng.choice(["cylinder", "rectangle"])
    ny = int(rng.integers(3, 5)) if topology == "cylinder" else int(rng.integers(1, 5))
    nxi = int(rng.integers(1, max_interior // ny + 1))
    h = rng.normal(scale=scale, size=(nxi + 2, ny))
    if quantum:
        h = np.round(h / quantum) * quantum
    return GridBand2D(nxi + 2, ny, float(rng.uniform(0.3, 1.5)), h, topology)
