"""Acceptance checks, one per headline criterion.

Each test prints a single ``PASS``/``FAIL`` line (with the measured
numbers and runtime) and then asserts. Run on its own with

    pytest tests/test_acceptance.py -v -s
    python3 tests/test_acceptance.py
"""

import filecmp
import math
import subprocess
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bubble_cases import random_grid  # noqa: E402
from muband.bubble_solver import (  # noqa: E402
    WarpedBand1D,
    brute_force_minimize,
    energy,
    flat_grid,
    minimize_1d,
    minimize_2d,
    perimeter,
    warped_band_from_model,
)
from muband.comparison import (  # noqa: E402
    check_hypotheses,
    ell_negative,
    ell_nonneg,
    negative_threshold,
)
from muband.errors import BarrierError, HypothesisError  # noqa: E402
from muband.model_spaces import (  # noqa: E402
    make_cone,
    make_hyperbolic,
    make_spherical,
    potential_derivative_of,
    potential_of,
)
from muband.pipelines import scenario_models, scenario_spec  # noqa: E402
from muband.potential_assembly import assemble, smooth_potential, verify_conditions  # noqa: E402
from muband.scenario import load_scenario  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
SCENARIOS = ROOT / "scenarios"


def report(name, ok, detail, elapsed, budget):
    ok = bool(ok) and elapsed < budget
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail} [{elapsed:.2f}s / {budget:g}s]"
    print("\n" + line, flush=True)
    return ok


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_ode_identity():
    with Timer() as tm:
        worst = 0.0
        for n in range(2, 8):
            cases = []
            for kappa in (0.5, 1.0, 2.0):
                half = 0.9 * math.pi / (math.sqrt(kappa) * n)
                cases.append(make_spherical(n, kappa, (-half, half)))
            for interval in ((0.1, 2.0), (0.5, 1.5), (1.0, 4.0)):
                cases.append(make_cone(n, interval))
            for sigma in (0.5, 1.0, 5.0):
                cases.append(make_hyperbolic(n, sigma, (0.1, 2.0)))
            for ms in cases:
                t = np.linspace(ms.a, ms.b, 10_000)
                h = potential_of(ms, t)
                dh = potential_derivative_of(ms, t)
                res = np.abs(ms.constant_curvature - (-n / (n - 1) * h**2 - 2 * dh))
                worst = max(worst, float(res.max()))
    ok = report("ODE identity", worst < 1e-9, f"max |sigma - (-n/(n-1) h^2 - 2h')| = {worst:.2e}", tm.elapsed, 1.0)
    assert ok


def test_nonneg_closed_form():
    with Timer() as tm:
        dmax = 2 * math.pi / 7
        v = ell_nonneg(7, 1.0, math.pi / 7).value
        ds = np.linspace(1e-3, dmax - 1e-3, 100)
        vals = np.array([ell_nonneg(7, 1.0, d).value for d in ds])
        small = ell_nonneg(7, 1.0, 1e-6).value
        large = ell_nonneg(7, 1.0, dmax - 1e-6).value
        # l ~ 8/(kappa n^2 d) as d -> 0 and l ~ (dmax - d)/2 as d -> dmax
        asym0 = small * 1e-6 / (8 / 49)
        asym1 = large / (1e-6 / 2)
    ok = (
        abs(v - 2 / 7) < 1e-12
        and np.all(np.diff(vals) < 0)
        and small > 1e5
        and large < 1e-5
        and abs(asym0 - 1) < 1e-6
        and abs(asym1 - 1) < 1e-6
    )
    ok = report(
        "closed-form width (scal >= 0)",
        ok,
        f"|l - 2/7| = {abs(v - 2 / 7):.1e}, monotone={bool(np.all(np.diff(vals) < 0))}, "
        f"l(1e-6) = {small:.4g}, l(dmax - 1e-6) = {large:.4g}",
        tm.elapsed,
        1.0,
    )
    assert ok


def test_negative_transcendental_solve():
    n = 7
    with Timer() as tm:
        worst = 0.0
        for kappa in (0.25, 0.5, 1.0, 2.0, 4.0):
            dmax = 2 * math.pi / (math.sqrt(kappa) * n)
            for df in (0.1, 0.3, 0.5, 0.7, 0.9):
                d = df * dmax
                thr = negative_threshold(n, kappa, d)
                for sf in (0.01, 0.25, 0.5, 0.75, 0.99):
                    worst = max(worst, ell_negative(n, kappa, sf * thr, d).residual)
        # doubling: sigma closes half the remaining gap to the threshold, 3 steps
        d = math.pi / 7
        thr = negative_threshold(n, 1.0, d)
        sigmas = [thr - thr / 2 ** (k + 1) for k in range(4)]
        ells = [ell_negative(n, 1.0, s, d).value for s in sigmas]
        ratios = [b / a for a, b in zip(ells, ells[1:])]
        doubles = all(r >= 2 for r in ratios)
        small_gap = max(
            abs(ell_negative(n, k, 1e-8, f * 2 * math.pi / (math.sqrt(k) * n)).value
                - ell_nonneg(n, k, f * 2 * math.pi / (math.sqrt(k) * n)).value)
            for k in (0.5, 1.0, 2.0)
            for f in (0.1, 0.5, 0.9)
        )
    ok = report(
        "transcendental width (scal >= -sigma)",
        worst < 1e-10 and doubles and small_gap < 1e-3,
        f"max residual {worst:.1e}; doubling ratios {', '.join(f'{r:.3f}' for r in ratios)} "
        f"(need >= 2); |l(1e-8) - l_nonneg| <= {small_gap:.1e}",
        tm.elapsed,
        5.0,
    )
    assert ok


def test_smoothing_certificate():
    with Timer() as tm:
        ms = make_spherical(7, 1.0, (-math.pi / 14, math.pi / 14))
        sp = smooth_potential(ms, 0.02, "both", points=10_000)
        cert = sp.certify(10_000)
        t = np.linspace(*sp.domain, 10_000)
        flat = sp.derivative(t) == 0
        gap = sp.sigma - sp.curvature_expression(t)
        strict_ok = bool(np.all(gap[flat] > 0))
    ok = report(
        "smoothing certificate conditions",
        cert.passed and strict_ok and flat.any(),
        f"identity={cert.identity_zone} const-ends={cert.constant_ends} "
        f"nonincreasing={cert.nonincreasing} curvature<=sigma={cert.curvature_bound}, "
        f"min strict margin at h'=0: {cert.min_strict_margin:.3e} on {int(flat.sum())} samples",
        tm.elapsed,
        1.0,
    )
    assert ok


def test_assembly_and_conditions():
    with Timer() as tm:
        sc = load_scenario(SCENARIOS / "cone_caps.toml")
        models = scenario_models(sc)
        spec = scenario_spec(sc, models)
        pot = assemble(spec, models)
        mismatch = float(np.max(pot.junction_mismatch()))
        cert = verify_conditions(pot, spec)
        core = models[1]
        slope = abs(float(potential_derivative_of(core, core.a)))
        broken = [models[0], make_spherical(7, 1.0, (core.a + 1e-3 / slope, core.b)), models[2]]
        try:
            check_hypotheses(spec, broken)
            condition = None
        except HypothesisError as exc:
            condition = exc.condition
    ok = report(
        "assembly continuity and conditions",
        mismatch < 1e-12 and cert.min_margin > 0 and condition == 3,
        f"junction mismatch {mismatch:.1e}, min margin {cert.min_margin:.4f}, "
        f"broken matching -> HypothesisError(condition {condition})",
        tm.elapsed,
        1.0,
    )
    assert ok


def _warped_case(dt):
    sc = load_scenario(SCENARIOS / "warped_spherical_1d.toml")
    models = scenario_models(sc)
    spec = scenario_spec(sc, models)
    pot = assemble(spec, models)
    n, D = spec.n, pot.length
    off = 0.45 * D
    amb = make_spherical(n, (math.pi / (n * D)) ** 2, (-off, D - off))
    return warped_band_from_model(
        amb,
        lambda s: pot.value(np.clip(np.asarray(s) + off, 0, D)),
        points=int(round(D / dt)) + 1,
        dh=lambda s: pot.gradient(np.clip(np.asarray(s) + off, 0, D)),
    )


def test_first_variation_1d():
    with Timer() as tm:
        one = lambda s: np.ones_like(np.asarray(s, dtype=float))  # noqa: E731
        zero = lambda s: np.zeros_like(np.asarray(s, dtype=float))  # noqa: E731
        band = WarpedBand1D(3, np.linspace(-1, 1, 2001), one, lambda s: -np.asarray(s), dw=zero)
        flat = minimize_1d(band)
        b1, b2 = _warped_case(1e-3), _warped_case(5e-4)
        r1, r2 = minimize_1d(b1), minimize_1d(b2)
        dt = b1.t[1] - b1.t[0]
        ratio = r2.residual / r1.residual
    ok = report(
        "1D first variation",
        flat.s_star == 0.0 and r1.residual <= 2 * dt and ratio <= 0.7,
        f"flat s* = {flat.s_star}, warped residual {r1.residual:.2e} <= {2 * dt:.1e}, "
        f"halving ratio {ratio:.3f}",
        tm.elapsed,
        2.0,
    )
    assert ok


def test_mincut_oracle_equivalence():
    rng = np.random.default_rng(20240601)
    with Timer() as tm:
        equal, topo = 0, set()
        for k in range(30):
            g = random_grid(rng, topology=("cylinder", "rectangle")[k % 2])
            assert int(g.interior_mask.sum()) <= 16
            topo.add(g.topology)
            r = minimize_2d(g, enforce_barrier=False)
            b = brute_force_minimize(g)
            equal += r.energy == b.energy
    ok = report(
        "min-cut = enumeration",
        equal == 30 and topo == {"cylinder", "rectangle"},
        f"{equal}/30 instances with identical energy",
        tm.elapsed,
        30.0,
    )
    assert ok


def test_geometry_2d():
    with Timer() as tm:
        g = flat_grid(2.0, 1.0, 200, 100, lambda X, Y: 1.0 - X)
        r = minimize_2d(g)
        xs = np.concatenate([line.points[:, 0] for line in r.boundary])
        offset = abs(xs.mean() - 1.0) / g.cell
        g0 = flat_grid(2.0, 1.0, 200, 100, lambda X, Y: np.zeros_like(X))
        r0 = minimize_2d(g0, enforce_barrier=False)
        length = perimeter(g0, r0.members)
    ok = report(
        "2D geometry",
        offset <= 2 and abs(length - 1.0) <= 0.05,
        f"centroid offset {offset:.3f} cells, h=0 cut length {length:.4f} (W = 1)",
        tm.elapsed,
        60.0,
    )
    assert ok


def test_barrier_detection():
    with Timer() as tm:
        raised = []
        for c in (0.1, 1.0, 7.0):
            g = flat_grid(2.0, 1.0, 20, 10, lambda X, Y: np.full_like(X, c))
            try:
                minimize_2d(g)
                raised.append(False)
            except BarrierError:
                raised.append(True)
            one = lambda s: np.ones_like(np.asarray(s, dtype=float))  # noqa: E731
            band = WarpedBand1D(
                3, np.linspace(0, 1, 101), one, lambda s: np.full_like(np.asarray(s), c),
                dw=lambda s: np.zeros_like(np.asarray(s, dtype=float)),
            )
            try:
                minimize_1d(band)
                raised.append(False)
            except BarrierError:
                raised.append(True)
    ok = report("barrier detection", all(raised), f"BarrierError in {sum(raised)}/{len(raised)} cases", tm.elapsed, 1.0)
    assert ok


def test_monotonicity_and_lattice():
    rng = np.random.default_rng(7)
    with Timer() as tm:
        mono = lattice = 0
        for _ in range(20):
            g = random_grid(rng, max_interior=12, quantum=0.5, scale=1.0)
            g = g.with_h(g.h)
            bump = np.round(np.abs(rng.normal(size=g.h.shape)) / 0.5) * 0.5
            e1 = minimize_2d(g, enforce_barrier=False).energy
            e2 = minimize_2d(g.with_h(g.h + bump), enforce_barrier=False).energy
            mono += e1 >= e2
            b = brute_force_minimize(g)
            canon = minimize_2d(g, enforce_barrier=False).members
            lattice += all(np.all(canon <= M) for M in b.minimizers) and all(
                energy(g, M | N) == b.energy and energy(g, M & N) == b.energy
                for M in b.minimizers
                for N in b.minimizers
            )
    ok = report(
        "monotonicity and lattice",
        mono == 20 and lattice == 20,
        f"antitone {mono}/20, canonical minimizer minimal {lattice}/20",
        tm.elapsed,
        10.0,
    )
    assert ok


def _run_suite(out):
    for path in sorted(SCENARIOS.glob("*.toml")):
        kind = load_scenario(path).kind
        subprocess.run(
            [sys.executable, "-m", "muband", kind, str(path), "--out", str(Path(out) / path.stem)],
            check=False,
            capture_output=True,
        )


def test_cli_determinism():
    with Timer() as tm, tempfile.TemporaryDirectory() as tmp:
        _run_suite(Path(tmp) / "a")
        _run_suite(Path(tmp) / "b")
        files = sorted(p.relative_to(Path(tmp) / "a") for p in (Path(tmp) / "a").rglob("*.csv"))
        same = [filecmp.cmp(Path(tmp) / "a" / f, Path(tmp) / "b" / f, shallow=False) for f in files]
    ok = report(
        "CLI determinism",
        len(files) > 0 and all(same),
        f"{sum(same)}/{len(files)} CSV files byte-identical across two runs",
        tm.elapsed,
        120.0,
    )
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
