"""Discrete mu-bubbles: 1D warped reduction and 2D min-cut solver."""

from .brute import brute_force_minimize
from .certificates import (
    BarrierReport,
    FirstVariationReport,
    Polyline,
    StabilityCertificate,
    boundary_polylines,
    check_barriers,
    check_first_variation,
    polyline_curvature,
    separates,
    stability_bound,
)
from .grid import (
    GridBand2D,
    WarpedBand1D,
    as_members,
    crofton_weights,
    energy,
    energy_1d,
    flat_grid,
    perimeter,
    straight_cut_factor,
    warped_band_from_model,
)
from .mincut import minimize_2d
from .result import BubbleResult
from .solve1d import minimize_1d

__all__ = [
    "BarrierReport",
    "BubbleResult",
    "FirstVariationReport",
    "GridBand2D",
    "Polyline",
    "StabilityCertificate",
    "WarpedBand1D",
    "as_members",
    "boundary_polylines",
    "brute_force_minimize",
    "check_barriers",
    "check_first_variation",
    "crofton_weights",
    "energy",
    "energy_1d",
    "flat_grid",
    "minimize_1d",
    "minimize_2d",
    "perimeter",
    "polyline_curvature",
    "separates",
    "stability_bound",
    "straight_cut_factor",
    "warped_band_from_model",
]
