"""Exact 2D minimization by an s-t minimum cut.

Node p of the graph is cell p; the source side of the cut is Omega.
Neighbour edges carry the perimeter weights in both directions. The bulk
term -h V [p in Omega] becomes a terminal edge: s -> p with capacity h V
when h > 0 (paid when p is left out) and p -> t with capacity |h| V when
h < 0 (paid when p is taken in). Collar cells are tied to their terminal
by arcs that no finite cut can afford.

scipy's max-flow only accepts int32 capacities, so real capacities are
scaled by q and rounded. q is as fine as 1e9 allows while keeping the
total capacity of the trivial cut below 2^31.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import breadth_first_order, maximum_flow

from ..errors import BarrierError
from .certificates import (
    boundary_polylines,
    check_barriers,
    check_first_variation,
    separates,
    stability_bound,
)
from .grid import GridBand2D, energy
from .result import BubbleResult

RESOLUTION = 1e-9
INT_LIMIT = 2**31 - 2


def _arcs(grid: GridBand2D):
    """Finite arcs (tail, head, capacity) and the constant energy offset."""
    N = grid.size
    s, t = N, N + 1
    p, q, w = grid.edges
    hv = grid.h.ravel() * grid.volume
    free = grid.interior_mask
    src = np.nonzero(free & (hv > 0))[0]
    snk = np.nonzero(free & (hv < 0))[0]
    tails = np.concatenate([p, q, np.full(src.size, s), snk])
    heads = np.concatenate([q, p, src, np.full(snk.size, t)])
    caps = np.concatenate([w, w, hv[src], -hv[snk]])
    offset = -math.fsum(hv[src]) - math.fsum(hv[grid.source_mask])
    return tails, heads, caps, offset


def _trivial_cut(grid, tails, heads, caps):
    """Capacity of the cut whose source side is the source collar only."""
    N = grid.size
    inside = np.zeros(N + 2, dtype=bool)
    inside[N] = True
    inside[:N] = grid.source_mask
    return math.fsum(caps[inside[tails] & ~inside[heads]])


def minimize_2d(grid: GridBand2D, enforce_barrier: bool = True) -> BubbleResult:
    barrier = check_barriers(grid)
    if enforce_barrier and barrier.violated:
        raise BarrierError(
            f"barrier condition fails on the collars: margins (d-, d+) = {barrier.margins}"
        )
    N = grid.size
    s, t = N, N + 1
    tails, heads, caps, offset = _arcs(grid)
    T0 = _trivial_cut(grid, tails, heads, caps)
    n_finite = caps.size
    q = 1.0 / RESOLUTION
    if T0 > 0:
        q = min(q, (INT_LIMIT - n_finite - 1) / T0)
    if caps.size and caps.max() > 0:
        q = min(q, INT_LIMIT / caps.max())
    icap = np.rint(caps * q).astype(np.int64)
    inf = int(math.floor(T0 * q)) + n_finite + 1
    src_cells = np.nonzero(grid.source_mask)[0]
    snk_cells = np.nonzero(grid.sink_mask)[0]
    tails = np.concatenate([tails, np.full(src_cells.size, s), snk_cells])
    heads = np.concatenate([heads, src_cells, np.full(snk_cells.size, t)])
    icap = np.concatenate([icap, np.full(src_cells.size + snk_cells.size, inf)])
    if icap.max(initial=0) > INT_LIMIT:
        raise OverflowError("capacities do not fit in int32 after scaling")
    C = coo_matrix((icap.astype(np.int32), (tails, heads)), shape=(N + 2, N + 2)).tocsr()
    C.sum_duplicates()
    flow = maximum_flow(C, s, t, method="dinic")
    # canonical minimal minimizer: what the source still reaches in the residual graph
    R = (C - flow.flow).tocsr()
    R.data[R.data < 0] = 0
    R.eliminate_zeros()
    reach = breadth_first_order(R, s, directed=True, return_predecessors=False)
    members = np.zeros(N, dtype=bool)
    reach = reach[reach < N]
    members[reach] = True
    e = energy(grid, members)
    result = BubbleResult(
        mode="grid-2d",
        members=members,
        energy=e,
        flow_energy=flow.flow_value / q + offset,
        scale_error_bound=n_finite / q,
        resolution=1.0 / q,
        barrier=barrier,
    )
    if not separates(grid, members):
        raise AssertionError("minimizer boundary does not separate the collars")
    result.boundary = boundary_polylines(grid, members)
    fv = check_first_variation(grid, result)
    result.residual = fv.max_residual
    result.mean_residual = fv.mean_residual
    result.stability = stability_bound(grid, result)
    return result
