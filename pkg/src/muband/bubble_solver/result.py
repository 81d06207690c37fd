"""Result container shared by the 1D and 2D solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class BubbleResult:
    """A discrete mu-bubble.

    ``members`` is the cell (2D) or grid-point (1D) membership of Omega.
    The outward normal of Omega points from Omega toward the sink side; the
    curvature in ``residual`` is taken w.r.t. the opposite normal.
    """

    mode: str
    members: np.ndarray
    energy: float
    boundary: list = field(default_factory=list)
    residual: float = float("nan")
    mean_residual: float = float("nan")
    stability: object = None
    barrier: object = None
    orientation: str = "outward: Omega -> complement"
    # 1D extras
    s_star: float = float("nan")
    s_grid: float = float("nan")
    index: int = -1
    degenerate: bool = False
    convex: bool = True
    # 2D extras
    flow_energy: float = float("nan")
    scale_error_bound: float = 0.0
    resolution: float = 0.0
    minimizers: list = field(default_factory=list)
