"""Pipelines behind the CLI subcommands; each returns a ReportBundle."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from itertools import product

import numpy as np

from . import comparison as cmp
from .bubble_solver import flat_grid, minimize_1d, minimize_2d, perimeter, warped_band_from_model
from .errors import MubandError, ParseError
from .model_spaces import (
    boundary_mean_curvatures,
    make_cone,
    make_hyperbolic,
    make_spherical,
    potential_derivative_of,
    potential_of,
    reflect,
    scalar_curvature_of,
    width_of,
)
from .potential_assembly import (
    PartitionedBandSpec,
    assemble,
    capped_band_models,
    verify_conditions,
)
from .report import ReportBundle, Table

# verify exit statuses
EXIT_WITNESS = 0
EXIT_CONTRADICTION = 3
EXIT_NONPOSITIVE = 4


def make_model(n, family, interval, kappa=1.0, sigma=1.0, reflected=False):
    if family == "spherical":
        ms = make_spherical(n, kappa, interval)
    elif family in ("cone", "hyperbolic"):
        a, b = interval
        base = (-b, -a) if reflected else (a, b)
        ms = make_cone(n, base) if family == "cone" else make_hyperbolic(n, sigma, base)
        if reflected:
            ms = reflect(ms)
    else:
        raise ParseError(f"unknown family {family!r}")
    return ms


def run_model(n, family, interval, kappa=1.0, sigma=1.0, points=201) -> ReportBundle:
    """Tabulate phi, h and the scalar curvature of a named family."""
    ms = make_model(n, family, interval, kappa, sigma, reflected=interval[1] <= 0)
    t = np.linspace(ms.a, ms.b, points)
    h = np.asarray(potential_of(ms, t))
    dh = np.asarray(potential_derivative_of(ms, t))
    scal = np.asarray(scalar_curvature_of(ms, t))
    table = Table.from_columns(
        "model", t=t, phi=ms.warping.phi(t), h=h, dh=dh, scal=scal
    )
    hm, hp = boundary_mean_curvatures(ms)
    metrics = {
        "n": n,
        "width": width_of(ms),
        "constant_curvature": ms.constant_curvature,
        "H_minus": hm,
        "H_plus": hp,
        "max_scal_deviation": float(np.max(np.abs(scal - ms.constant_curvature))),
    }
    return ReportBundle("model", family, [table], metrics, verdict="tabulated")


def run_width(n, kappa, d, sigma=None) -> ReportBundle:
    cl = cmp.classical_bound(n, kappa)
    nn = cmp.ell_nonneg(n, kappa, d)
    thr = cmp.negative_threshold(n, kappa, d)
    row = {"n": n, "kappa": kappa, "d": d, "classical": cl, "ell": nn.value,
           "ell_residual": nn.residual, "sigma_threshold": thr}
    if sigma is not None:
        neg = cmp.ell_negative(n, kappa, sigma, d)
        row.update(sigma=sigma, ell_negative=neg.value, ell_negative_residual=neg.residual)
    table = Table("width", list(row), [list(row.values())])
    return ReportBundle("width", f"n={n}", [table], dict(row), verdict="evaluated")


def run_potential(n, kappa, d, eps=None, width_factor=1.1, points_per_segment=400) -> ReportBundle:
    """Assembled potential of the nonnegative-curvature band on a wider band."""
    models, _ = capped_band_models(n, kappa, d)
    spec = PartitionedBandSpec(
        n, tuple(width_factor * width_of(m) for m in models),
        tuple(m.constant_curvature for m in models),
    )
    pot = assemble(spec, models, eps)
    cert = verify_conditions(pot, spec, points_per_segment)
    return _potential_report("potential", f"n={n}", pot, cert)


def _potential_report(command, name, pot, cert) -> ReportBundle:
    table = Table.from_columns(
        "potential", segment=cert.segment, x=cert.x, h=cert.h, grad=cert.grad, margin=cert.margin
    )
    metrics = {
        "eps": pot.eps,
        "length": pot.length,
        "max_junction_mismatch": float(np.max(pot.junction_mismatch(), initial=0.0)),
        "min_condition_margin": min(float(v) for v in cert.margin),
        "max_abs_h": max(abs(float(v)) for v in cert.h),
        "argmin_x": cert.argmin_x,
        "barrier_margin_minus": cert.boundary_margins[0],
        "barrier_margin_plus": cert.boundary_margins[1],
    }
    return ReportBundle(command, name, [table], metrics, verdict="assembled")


# scenarios -------------------------------------------------------------


def scenario_models(sc):
    n = sc.band["n"]
    m = sc.models
    preset = m.get("preset")
    if preset == "cone-caps":
        models, _ = capped_band_models(n, m.get("kappa", 1.0), m["d"], delta=m.get("delta"))
    elif preset == "hyperbolic-caps":
        if "sigma" not in m:
            raise ParseError("hyperbolic-caps needs [models].sigma")
        models, _ = capped_band_models(
            n, m.get("kappa", 1.0), m["d"], "hyperbolic", m["sigma"], delta=m.get("delta")
        )
    else:
        models = [
            make_model(
                n, seg["family"], tuple(seg["interval"]), seg.get("kappa", 1.0),
                seg.get("sigma", 1.0), reflected=seg["interval"][1] <= 0,
            )
            for seg in m["segments"]
        ]
    return models


def scenario_spec(sc, models) -> PartitionedBandSpec:
    b = sc.band
    if "widths" in b:
        widths = tuple(b["widths"])
    else:
        widths = tuple(b["width_factor"] * width_of(m) for m in models)
    scal = tuple(b.get("scal_lower", [m.constant_curvature for m in models]))
    return PartitionedBandSpec(b["n"], widths, scal, b.get("H_minus", 0.0), b.get("H_plus", 0.0))


def run_verify(sc) -> ReportBundle:
    models = scenario_models(sc)
    spec = scenario_spec(sc, models)
    verdict = cmp.evaluate_partitioned(spec, models, sc.solver.get("eps"))
    rows = []
    for j, (m, (measured, model_w)) in enumerate(zip(models, verdict.pairs)):
        hm, hp = boundary_mean_curvatures(m)
        rows.append([j + 1, m.family, m.a, m.b, model_w, measured, spec.scal_lower[j],
                     m.constant_curvature, hm, hp])
    seg_table = Table(
        "segments",
        ["segment", "family", "a", "b", "model_width", "measured_width", "scal_lower",
         "model_curvature", "H_minus", "H_plus"],
        rows,
    )
    if verdict.index is not None:
        metrics = {"witness_segment": verdict.index}
        return ReportBundle(
            "verify", sc.name, [seg_table], metrics,
            verdict=f"segment {verdict.index} is no wider than its model", exit_code=EXIT_WITNESS,
        )
    cert = verify_conditions(
        verdict.certificate.potential, spec, sc.solver.get("points_per_segment", 2000)
    )
    rep = _potential_report("verify", sc.name, verdict.certificate.potential, cert)
    rep.tables.insert(0, seg_table)
    positive = cert.passed
    rep.metrics["certificate_positive"] = positive
    rep.verdict = (
        "all segments wider than their models: contradiction certificate with positive margins"
        if positive else "all segments wider but the certificate is not positive"
    )
    rep.exit_code = EXIT_CONTRADICTION if positive else EXIT_NONPOSITIVE
    return rep


def _grid_h(g):
    kind = g.get("h", "constant")
    if kind == "constant":
        value = float(g.get("value", 0.0))
        return lambda X, Y: np.full_like(X, value)
    c, x0 = float(g.get("c", 1.0)), float(g.get("x0", 1.0))
    return lambda X, Y: c * (x0 - X)


def run_bubble(sc) -> ReportBundle:
    g = sc.grid
    enforce = sc.solver.get("enforce_barrier", True)
    if g["mode"] == "grid-2d":
        grid = flat_grid(
            g["length"], g["height"], g["nx"], g["ny"], _grid_h(g),
            topology=g.get("topology", "cylinder"),
            H_minus=g.get("H_minus", 0.0), H_plus=g.get("H_plus", 0.0),
            scal_lower=g.get("scal_lower", 0.0),
        )
        res = minimize_2d(grid, enforce_barrier=enforce)
        rows = []
        for k, line in enumerate(res.boundary):
            for v, (x, y) in enumerate(line.points):
                rows.append([k, v, x, y])
        bt = Table("boundary", ["polyline", "vertex", "x", "y"], rows)
        xs = [float(r[2]) for r in rows]
        metrics = {
            "energy": res.energy,
            "flow_energy": res.flow_energy,
            "scale_error_bound": res.scale_error_bound,
            "perimeter": perimeter(grid, res.members),
            "boundary_centroid_x": math.fsum(xs) / len(xs) if xs else math.nan,
            "polylines": len(res.boundary),
            "max_curvature_residual": res.residual,
            "mean_curvature_residual": res.mean_residual,
            "stability_b": res.stability.b,
            "stability_failed": res.stability.failed,
            "barrier_margin_minus": res.barrier.margins[0],
            "barrier_margin_plus": res.barrier.margins[1],
        }
        return ReportBundle("bubble", sc.name, [bt], metrics, verdict="2D mu-bubble found")
    # warped 1D: ambient spherical around the assembled potential of the band
    models = scenario_models(sc)
    spec = scenario_spec(sc, models)
    pot = assemble(spec, models, sc.solver.get("eps"))
    n, D = spec.n, pot.length
    kw = g.get("ambient_kappa", (math.pi / (n * D)) ** 2)
    off = g.get("ambient_offset", 0.45) * D
    amb = make_spherical(n, kw, (-off, D - off))
    dt = g.get("dt", 1e-3)
    points = int(round(D / dt)) + 1

    def h(s):
        return pot.value(np.clip(np.asarray(s, dtype=float) + off, 0.0, D))

    def dh(s):
        return pot.gradient(np.clip(np.asarray(s, dtype=float) + off, 0.0, D))

    band = warped_band_from_model(amb, h, points=points, dh=dh)
    res = minimize_1d(band, enforce_barrier=enforce)
    F = band.slice_energy()
    table = Table.from_columns(
        "slices", t=band.t, F=F, h=band.h_values(), slice_curvature=band.slice_curvature(band.t)
    )
    metrics = {
        "s_star": res.s_star,
        "s_grid": res.s_grid,
        "energy_1d": res.energy,
        "first_variation_residual": res.residual,
        "dt": float(band.t[1] - band.t[0]),
        "degenerate": res.degenerate,
        "stability_b": res.stability.b,
        "stability_failed": res.stability.failed,
        "barrier_margin_minus": res.barrier.margins[0],
        "barrier_margin_plus": res.barrier.margins[1],
    }
    return ReportBundle("bubble", sc.name, [table], metrics, verdict="1D mu-bubble found")


SWEEP_COLUMNS = ["n", "kappa", "d", "sigma", "classical", "ell_nonneg", "ell_nonneg_residual",
                 "sigma_threshold", "ell_negative", "ell_negative_residual", "status"]


def sweep_point(args):
    n, kappa, d, sigma, d_is_fraction, sigma_is_fraction = args
    n = int(n)
    try:
        cl = cmp.classical_bound(n, kappa)
        if d_is_fraction:
            d = d * cl
        nn = cmp.ell_nonneg(n, kappa, d)
        thr = cmp.negative_threshold(n, kappa, d)
        row = [n, kappa, d, math.nan, cl, nn.value, nn.residual, thr, math.nan, math.nan, "ok"]
        if sigma is not None:
            s = sigma * thr if sigma_is_fraction else sigma
            neg = cmp.ell_negative(n, kappa, s, d)
            row[3], row[8], row[9] = s, neg.value, neg.residual
        return row
    except MubandError as exc:
        return [n, kappa, d, math.nan if sigma is None else sigma, math.nan, math.nan,
                math.nan, math.nan, math.nan, math.nan, type(exc).__name__]


def run_sweep(sc, jobs=None) -> ReportBundle:
    sw = sc.sweep
    d_frac = "d_fraction" in sw
    s_frac = "sigma_fraction" in sw
    ds = sw["d_fraction"] if d_frac else sw["d"]
    sigmas = sw.get("sigma_fraction", sw.get("sigma", [None]))
    points = [
        (n, k, d, s, d_frac, s_frac)
        for n, k, d, s in product(sw["n"], sw.get("kappa", [1.0]), ds, sigmas)
    ]
    jobs = jobs or sw.get("jobs", 1)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            rows = list(pool.map(sweep_point, points, chunksize=8))
    else:
        rows = [sweep_point(p) for p in points]
    table = Table("sweep", SWEEP_COLUMNS, rows)
    failed = sum(r[-1] != "ok" for r in rows)
    metrics = {"points": len(rows), "failed_points": failed}
    return ReportBundle("sweep", sc.name, [table], metrics, verdict=f"{len(rows)} points")


def run_scenario(sc, jobs=None) -> ReportBundle:
    if sc.kind == "verify":
        return run_verify(sc)
    if sc.kind == "bubble":
        return run_bubble(sc)
    return run_sweep(sc, jobs)


__all__ = [
    "run_bubble", "run_model", "run_potential", "run_scenario", "run_sweep",
    "run_verify", "run_width",
]
