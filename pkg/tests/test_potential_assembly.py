import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from muband.errors import CertificateError, DomainError, MatchError, NoRootError, WidthError
from muband.model_spaces import make_cone, make_spherical, potential_of, width_of
from muband.potential_assembly import (
    ConstantPotential,
    PartitionedBandSpec,
    assemble,
    band_coordinate,
    capped_band_models,
    make_cutoff,
    match_segments,
    smooth_potential,
    verify_conditions,
)


def test_cutoff_examples():
    c = make_cutoff(0.0, 1.0, 0.1)
    assert c.rho(0.5) == 0.5
    assert c.rho(-0.1) == 0.0 and c.rho(1.1) == 1.0
    zone = np.linspace(-0.05, 0.05, 10_001)[1:-1]
    slope = c.drho(zone)
    assert np.all(slope > 0) and np.all(slope < 1)
    with pytest.raises(DomainError):
        make_cutoff(0.0, 1.0, 0.5)


@given(
    a=st.floats(-5, 5),
    w=st.floats(0.1, 5),
    frac=st.floats(0.01, 0.49),
    u=st.floats(-0.5, 1.5),
)
def test_cutoff_properties(a, w, frac, u):
    b, eps = a + w, frac * w
    c = make_cutoff(a, b, eps)
    t = a + u * w
    r = float(c.rho(t))
    assert a <= r <= b
    assert 0.0 <= float(c.drho(t)) <= 1.0
    if a + eps / 2 <= t <= b - eps / 2:
        assert r == t
    # rho' really is the derivative of rho
    step = 1e-6 * w
    fd = (c.rho(t + step) - c.rho(t - step)) / (2 * step)
    assert fd == pytest.approx(float(c.drho(t)), abs=1e-5)


def test_smoothing_spherical_example():
    ms = make_spherical(2, 1.0, (-math.pi / 4, math.pi / 4))
    sp = smooth_potential(ms, 0.05, "both")
    cert = sp.certify()
    assert cert.passed and cert.min_strict_margin > 0
    assert sp.value(-math.pi / 4 - 0.05) == pytest.approx(1.0, abs=1e-15)
    assert sp.value(math.pi / 4 + 0.05) == pytest.approx(-1.0, abs=1e-15)


def test_one_sided_smoothing_is_exact_on_the_far_side():
    ms = make_spherical(3, 1.0, (-0.4, 0.4))
    sp = smooth_potential(ms, 0.05, "left-only")
    t = np.linspace(-0.4 + 0.05, 0.4, 500)
    np.testing.assert_array_equal(sp.value(t), potential_of(ms, t))
    assert sp.domain == pytest.approx((-0.45, 0.45))


def test_smoothing_rejects_large_eps():
    ms = make_spherical(2, 1.0, (-0.5, 0.5))
    with pytest.raises(CertificateError):
        smooth_potential(ms, 0.5)
    # a right-only smoothing of a cone must extend below t = 0.01 by eps
    with pytest.raises(CertificateError):
        smooth_potential(make_cone(3, (0.01, 1.0)), 0.05, "right-only")


@given(n=st.integers(2, 7), frac=st.floats(0.1, 0.95), efrac=st.floats(0.01, 0.45))
def test_strictness_identity(n, frac, efrac):
    half = frac * math.pi / n
    ms = make_spherical(n, 1.0, (-half, half))
    sp = smooth_potential(ms, efrac * half, "both", points=2000)
    t = np.linspace(*sp.domain, 2000)
    gap = sp.sigma - sp.curvature_expression(t)
    np.testing.assert_allclose(gap, sp.strictness_identity(t), atol=1e-9 * (1 + sp.sigma))


def test_band_coordinate():
    bc = band_coordinate(2.0, (0.0, 1.0))
    assert bc.lipschitz == 0.5 and bc(1.0) == 0.5
    assert bc(0.0) == 0.0 and bc(2.0) == 1.0
    with pytest.raises(WidthError):
        band_coordinate(1.0, (0.0, 1.0))


@given(dp=st.floats(0.01, 100), lo=st.floats(-10, 10), frac=st.floats(0.01, 0.999))
def test_band_coordinate_ends(dp, lo, frac):
    hi = lo + frac * dp
    bc = band_coordinate(dp, (lo, hi))
    assert bc(0.0) == lo and bc(dp) == hi and bc.lipschitz < 1


def test_match_segments_limit():
    # n=2, kappa=1, d=pi/2: h_core(-pi/4) = 1 = h_cone(1) and ell = cot(pi/4) = 1
    m = match_segments(2, 1.0, math.pi / 2, delta_inner=1e-9)
    assert m.ell == pytest.approx(1.0, abs=1e-12)
    assert m.endpoint == pytest.approx(1.0, abs=1e-8)
    assert 0 < m.delta_outer < m.t_boundary < m.endpoint


def test_match_segments_boundary_requirement():
    m = match_segments(3, 1.0, 0.5, H_boundary=-10.0)
    assert -potential_of(m.model, m.t_boundary) <= -10.0


def test_match_segments_near_dmax_has_no_root():
    with pytest.raises(NoRootError) as exc:
        match_segments(7, 1.0, 2 * math.pi / 7 * (1 - 1e-15))
    assert "blows up" in str(exc.value)


def _capped_setup(factor=1.1, n=7, d=math.pi / 7):
    models, _ = capped_band_models(n, 1.0, d)
    spec = PartitionedBandSpec(
        n, tuple(factor * width_of(m) for m in models), tuple(m.constant_curvature for m in models)
    )
    return spec, models


def test_assembly_continuity_and_margins():
    spec, models = _capped_setup()
    pot = assemble(spec, models)
    assert np.max(pot.junction_mismatch()) < 1e-12
    cert = verify_conditions(pot, spec)
    assert cert.passed and cert.min_margin > 0
    x = np.linspace(0, pot.length, 20_000)
    assert np.all(pot.gradient(x) <= 0)
    assert np.all(np.diff(pot.value(x)) <= 1e-12)


def test_composition_bound():
    spec, models = _capped_setup()
    pot = assemble(spec, models)
    for j, (sp, bc) in enumerate(pot.pieces):
        x, _, g = pot.segment_grid(j, 1000)
        raw = sp.derivative(bc(x - pot.offsets[j]))
        assert np.all(np.abs(g) <= np.abs(raw))


def test_assembly_errors():
    spec, models = _capped_setup()
    with pytest.raises(WidthError):
        assemble(PartitionedBandSpec(7, (width_of(models[0]),) + spec.widths[1:], spec.scal_lower), models)
    core = models[1]
    shifted = [models[0], make_spherical(7, 1.0, (core.a + 1e-3, core.b)), models[2]]
    with pytest.raises(MatchError):
        assemble(spec, shifted)


def test_single_segment_assembly():
    ms = make_spherical(4, 1.0, (-0.3, 0.3))
    spec = PartitionedBandSpec(4, (0.7,), (12.0,), H_minus=10.0, H_plus=10.0)
    pot = assemble(spec, [ms])
    cert = verify_conditions(pot, spec)
    assert cert.min_margin > 0


def test_constant_potential_boundary_cases():
    spec0 = PartitionedBandSpec(3, (1.0,), (0.0,))
    cert = verify_conditions(ConstantPotential(0.0, (1.0,)), spec0)
    assert cert.min_margin == 0.0 and not cert.passed
    cert = verify_conditions(ConstantPotential(0.7, (1.0,)), spec0)
    assert cert.boundary_margins[1] == pytest.approx(-0.7)
    assert not cert.passed


@pytest.mark.parametrize("n,d", [(3, 0.5), (5, 0.6), (7, math.pi / 7), (2, 1.0)])
def test_surplus_always_certifies(n, d):
    spec, models = _capped_setup(1.05, n, d)
    assert verify_conditions(assemble(spec, models), spec).passed
