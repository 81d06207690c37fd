"""Barrier checks, boundary extraction, first-variation and stability reports."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridBand2D, WarpedBand1D, as_members


@dataclass(frozen=True)
class BarrierReport:
    margins: tuple  # (H(d-X) + h on d-X, H(d+X) - h on d+X)

    @property
    def passed(self) -> bool:
        return all(m > 0 for m in self.margins)

    @property
    def violated(self) -> bool:
        return any(m < 0 for m in self.margins)


def check_barriers(band) -> BarrierReport:
    """Strict barrier margins H(d+-X) -+ h.

    In 1D the boundary mean curvatures come from the warping; on 2D grids
    they are the declared collar values compared against h on the outermost
    collar columns.
    """
    if isinstance(band, WarpedBand1D):
        return BarrierReport(
            (
                band.H_minus + float(band.h_at(band.A)),
                band.H_plus - float(band.h_at(band.B)),
            )
        )
    return BarrierReport(
        (
            float(np.min(band.H_minus + band.h[0])),
            float(np.min(band.H_plus - band.h[-1])),
        )
    )


@dataclass(frozen=True)
class Polyline:
    """Oriented piece of the discrete Sigma, Omega on the left."""

    points: np.ndarray  # (m + 1, 2) real coordinates, unwrapped in y
    closed: bool
    cells: np.ndarray  # (m, 2) flat indices (inside cell, outside cell)

    @property
    def directions(self):
        return np.diff(self.points, axis=0)


def _dual_edges(grid: GridBand2D, m):
    """Directed unit segments between inside and outside axis neighbours."""
    M = m.reshape(grid.nx, grid.ny)
    ny = grid.ny
    segs = []
    # vertical segments at lattice x = i + 1
    for i in range(grid.nx - 1):
        a, b = M[i], M[i + 1]
        for j in np.nonzero(a != b)[0]:
            p, q = grid.index(i, j), grid.index(i + 1, j)
            if a[j]:
                segs.append(((i + 1, j), (0, 1), p, q))
            else:
                segs.append(((i + 1, (j + 1) % ny if grid.topology == "cylinder" else j + 1), (0, -1), q, p))
    # horizontal segments at lattice y = j + 1
    jmax = ny if grid.topology == "cylinder" else ny - 1
    for j in range(jmax):
        j2 = (j + 1) % ny
        a, b = M[:, j], M[:, j2]
        for i in np.nonzero(a != b)[0]:
            p, q = grid.index(i, j), grid.index(i, j2)
            y = j2 if grid.topology == "cylinder" else j + 1
            if a[i]:
                segs.append(((i + 1, y), (-1, 0), p, q))
            else:
                segs.append(((i, y), (1, 0), q, p))
    return segs


def boundary_polylines(grid: GridBand2D, members) -> list[Polyline]:
    """Chain the boundary of Omega (inside X) into oriented polylines.

    At saddle vertices the right-most turn is taken, so diagonally touching
    cells of Omega are enclosed together (8-connectivity, matching the
    diagonal edges of the perimeter graph).
    """
    m = as_members(grid, members)
    segs = _dual_edges(grid, m)
    ny = grid.ny
    cyl = grid.topology == "cylinder"

    def key(v):
        return (v[0], v[1] % ny) if cyl else v

    out = {}
    indeg = {}
    for k, (start, d, _, _) in enumerate(segs):
        out.setdefault(key(start), []).append(k)
        end = key((start[0] + d[0], start[1] + d[1]))
        indeg[end] = indeg.get(end, 0) + 1
    used = np.zeros(len(segs), dtype=bool)

    def trace(k0):
        pts = [np.array(segs[k0][0], dtype=float)]
        cells = []
        k = k0
        while True:
            used[k] = True
            start, d, p, q = segs[k]
            pts.append(pts[-1] + d)
            cells.append((p, q))
            v = key((int(round(pts[-1][0])), int(round(pts[-1][1]))))
            cand = [c for c in out.get(v, []) if not used[c] or c == k0]
            if not cand:
                return pts, cells, False
            # turn preference: right, straight, left
            right = (d[1], -d[0])
            left = (-d[1], d[0])
            order = {right: 0, d: 1, left: 2}
            k = min(cand, key=lambda c: order.get(segs[c][1], 3))
            if k == k0:
                return pts, cells, True

    lines = []
    starts = [v for v in out if len(out[v]) > indeg.get(v, 0)]
    for v in sorted(starts):
        for k in out[v]:
            if not used[k]:
                pts, cells, closed = trace(k)
                lines.append((pts, cells, closed))
    for k in range(len(segs)):
        if not used[k]:
            pts, cells, closed = trace(k)
            lines.append((pts, cells, closed))
    result = []
    for pts, cells, closed in lines:
        result.append(
            Polyline(np.array(pts) * grid.cell, closed, np.array(cells, dtype=int))
        )
    return result


def separates(grid: GridBand2D, members) -> bool:
    """True when no path of the cell graph joins the collars without a cut edge."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import breadth_first_order

    m = as_members(grid, members)
    p, q, _ = grid.edges
    keep = m[p] == m[q]
    n = grid.size
    adj = coo_matrix(
        (np.ones(2 * keep.sum()), (np.r_[p[keep], q[keep]], np.r_[q[keep], p[keep]])),
        shape=(n, n),
    ).tocsr()
    start = int(np.nonzero(grid.source_mask)[0][0])
    seen = np.zeros(n, dtype=bool)
    for s in np.nonzero(grid.source_mask)[0]:
        if not seen[s]:
            seen[breadth_first_order(adj, int(s), directed=False, return_predecessors=False)] = True
    del start
    return not np.any(seen[grid.sink_mask])


@dataclass(frozen=True)
class FirstVariationReport:
    max_residual: float
    mean_residual: float
    curvature: np.ndarray
    h_avg: np.ndarray


def _turn(u, v):
    return math.atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1])


def polyline_curvature(line: Polyline, cell: float):
    """Turning-angle curvature per segment over a 3-segment stencil.

    Positive when the curve turns left, i.e. Omega is locally convex, which
    is the mean curvature w.r.t. the normal pointing into Omega.
    """
    d = line.directions
    m = len(d)
    if line.closed:
        idx = range(m)
    else:
        idx = range(1, m - 1)
    kappa = np.full(m, np.nan)
    for i in idx:
        a, b = d[(i - 1) % m], d[(i + 1) % m]
        span = 0.5 * np.hypot(*a) + np.hypot(*d[i]) + 0.5 * np.hypot(*b)
        kappa[i] = _turn(a, b) / span
    return kappa


def check_first_variation(band, result) -> FirstVariationReport:
    """Mean-curvature residual |H(Sigma) - h| along the computed bubble."""
    if isinstance(band, WarpedBand1D):
        s = result.s_star
        curv = float(band.slice_curvature(s))
        hv = float(band.h_at(s))
        r = abs(curv - hv)
        return FirstVariationReport(r, r, np.array([curv]), np.array([hv]))
    h = band.h.ravel()
    ks, hs = [], []
    for line in result.boundary:
        k = polyline_curvature(line, band.cell)
        ok = ~np.isnan(k)
        ks.append(k[ok])
        hs.append(0.5 * (h[line.cells[ok, 0]] + h[line.cells[ok, 1]]))
    k = np.concatenate(ks) if ks else np.array([])
    hv = np.concatenate(hs) if hs else np.array([])
    if k.size == 0:
        return FirstVariationReport(math.nan, math.nan, k, hv)
    res = np.abs(k - hv)
    return FirstVariationReport(float(res.max()), float(res.mean()), k, hv)


@dataclass(frozen=True)
class StabilityCertificate:
    """b = max(0, min over Sigma of (scal + n/(n-1) h^2 - 2|grad h|) / 2).

    The psi = 1 fields evaluate both sides of the stability inequality for the
    constant test function; Sigma is scalar flat here (a slice of the flat
    fiber, or a curve), so the left side vanishes and b > 0 makes it fail.
    """

    b: float
    min_value: float
    failed: bool
    method: str = "pointwise-min"
    psi_one_lhs: float = 0.0
    psi_one_rhs: float = 0.0

    @property
    def psi_one_holds(self) -> bool:
        return self.psi_one_lhs >= self.psi_one_rhs


def _grid_gradient_norm(band: GridBand2D):
    h = band.h
    gx = np.gradient(h, band.cell, axis=0) if band.nx > 1 else np.zeros_like(h)
    if band.topology == "cylinder":
        gy = (np.roll(h, -1, axis=1) - np.roll(h, 1, axis=1)) / (2 * band.cell)
    elif band.ny > 1:
        gy = np.gradient(h, band.cell, axis=1)
    else:
        gy = np.zeros_like(h)
    return np.hypot(gx, gy)


def stability_bound(band, result, scal_lower=None) -> StabilityCertificate:
    n = band.n
    if isinstance(band, WarpedBand1D):
        s = result.s_star
        scal = float(band.scal_at(s)) if scal_lower is None else float(scal_lower(s))
        hv = float(band.h_at(s))
        val = scal + n / (n - 1) * hv**2 - 2 * abs(float(band.dh_at(s)))
        vol = float(band.w(s)) ** (n - 1) * band.fiber_volume
    else:
        if scal_lower is None:
            scal = np.broadcast_to(np.asarray(band.scal_lower, dtype=float), band.h.shape)
        else:
            X, Y = band.centers()
            scal = np.broadcast_to(np.asarray(scal_lower(X, Y), dtype=float), band.h.shape)
        field = scal + n / (n - 1) * band.h**2 - 2 * _grid_gradient_norm(band)
        field = field.ravel()
        cells = [line.cells.ravel() for line in result.boundary]
        if not cells:
            return StabilityCertificate(0.0, math.nan, True)
        val = float(np.min(field[np.concatenate(cells)]))
        vol = sum(len(line.cells) for line in result.boundary) * band.cell
    b = 0.5 * val if val > 0 else 0.0
    return StabilityCertificate(
        b=b,
        min_value=val,
        failed=not val > 0,
        psi_one_lhs=0.0,
        psi_one_rhs=b * vol,
    )
