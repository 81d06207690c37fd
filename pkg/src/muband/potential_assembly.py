"""Glued potentials over a partitioned band coordinate.

Each model potential h is flattened near its ends by composing with a
cutoff rho (h_hat = h o rho), pulled back along an affine band coordinate
beta with slope < 1, and the pieces are concatenated. Adjacent pieces
agree because the models' mean curvatures match and every piece is
constant near the junctions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import roots
from .errors import CertificateError, DomainError, MatchError, NoRootError, ThresholdError, WidthError
from .model_spaces import (
    ModelSpace,
    make_cone,
    make_hyperbolic,
    make_spherical,
    potential_derivative_of,
    potential_of,
    reflect,
    width_of,
)

SIDES = ("both", "left-only", "right-only", "none")
MATCH_TOL = 1e-10
T_FLOOR = 1e-8
MARGIN_TARGET = 1e-8


def _smoothstep(u):
    """Quintic smoothstep: 0 -> 1 with vanishing first and second derivatives."""
    return u**3 * (10 - 15 * u + 6 * u**2)


def _smoothstep_integral(u):
    # int_0^u smoothstep; equals 1/2 at u = 1
    return u**4 * (2.5 - 3 * u + u**2)


@dataclass(frozen=True)
class CutoffProfile:
    """rho: R -> [a, b], clamping near a and/or b over zones of width eps.

    rho' is a quintic smoothstep inside a transition zone, so rho is C^3
    and 0 < rho' < 1 strictly inside each zone.
    """

    a: float
    b: float
    eps: float
    left: bool = True
    right: bool = True

    def rho(self, t):
        t = np.asarray(t, dtype=float)
        out = t.copy()
        e = self.eps
        if self.left:
            lo, hi = self.a - e / 2, self.a + e / 2
            ramp = self.a + e * _smoothstep_integral(np.clip((t - lo) / e, 0, 1))
            out = np.where(t <= lo, self.a, np.where(t < hi, ramp, out))
        if self.right:
            lo, hi = self.b - e / 2, self.b + e / 2
            ramp = self.b - e * _smoothstep_integral(np.clip((hi - t) / e, 0, 1))
            out = np.where(t >= hi, self.b, np.where(t > lo, ramp, out))
        return out

    def drho(self, t):
        t = np.asarray(t, dtype=float)
        out = np.ones_like(t)
        e = self.eps
        if self.left:
            lo, hi = self.a - e / 2, self.a + e / 2
            s = _smoothstep(np.clip((t - lo) / e, 0, 1))
            out = np.where(t <= lo, 0.0, np.where(t < hi, s, out))
        if self.right:
            lo, hi = self.b - e / 2, self.b + e / 2
            s = _smoothstep(np.clip((hi - t) / e, 0, 1))
            out = np.where(t >= hi, 0.0, np.where(t > lo, s, out))
        return out


def make_cutoff(a, b, eps, left=True, right=True) -> CutoffProfile:
    if not eps > 0:
        raise DomainError("eps must be positive")
    if not eps < (b - a) / 2:
        raise DomainError(f"eps={eps!r} must be below half the width {(b - a) / 2!r}")
    return CutoffProfile(float(a), float(b), float(eps), left, right)


@dataclass(frozen=True)
class SmoothingCertificate:
    identity_zone: bool
    constant_ends: bool
    nonincreasing: bool
    curvature_bound: bool
    min_strict_margin: float
    max_excess: float

    @property
    def passed(self) -> bool:
        return (
            self.identity_zone
            and self.constant_ends
            and self.nonincreasing
            and self.curvature_bound
        )


@dataclass(frozen=True)
class SmoothedPotential:
    """h_hat = h o rho on [a - eps, b + eps].

    ``model`` may carry an extended domain (one-sided smoothing evaluates h
    beyond the original interval); ``a``/``b`` are the original ends.
    """

    model: ModelSpace
    cutoff: CutoffProfile
    side: str
    a: float
    b: float
    eps: float
    sigma: float

    @property
    def domain(self) -> tuple[float, float]:
        return self.a - self.eps, self.b + self.eps

    def value(self, t):
        return potential_of(self.model, self.cutoff.rho(t))

    def derivative(self, t):
        r = self.cutoff.rho(t)
        return potential_derivative_of(self.model, r) * self.cutoff.drho(t)

    def curvature_expression(self, t):
        """-n/(n-1) h_hat^2 - 2 h_hat'."""
        n = self.model.n
        return -n / (n - 1) * self.value(t) ** 2 - 2 * self.derivative(t)

    def strictness_identity(self, t):
        """2 |h'(rho)| (1 - rho'), the exact gap sigma - curvature_expression."""
        r = self.cutoff.rho(t)
        return 2 * np.abs(potential_derivative_of(self.model, r)) * (1 - self.cutoff.drho(t))

    def certify(self, points=10_000) -> SmoothingCertificate:
        lo, hi = self.domain
        t = np.linspace(lo, hi, points)
        hh = self.value(t)
        dh = self.derivative(t)
        e = self.eps
        ident_lo = self.a + e if self.cutoff.left else lo
        ident_hi = self.b - e if self.cutoff.right else hi
        core = (t >= ident_lo) & (t <= ident_hi)
        identity_ok = bool(np.all(hh[core] == potential_of(self.model, t[core])))
        ends_ok = True
        if self.cutoff.left:
            zone = t <= self.a - e / 2
            ends_ok &= bool(np.all(hh[zone] == potential_of(self.model, self.a)))
        if self.cutoff.right:
            zone = t >= self.b + e / 2
            ends_ok &= bool(np.all(hh[zone] == potential_of(self.model, self.b)))
        n = self.model.n
        expr = -n / (n - 1) * hh**2 - 2 * dh
        tol = 1e-9 * (1 + abs(self.sigma))
        excess = expr - self.sigma
        flat = dh == 0
        strict = self.sigma - expr[flat]
        min_strict = float(np.min(strict)) if strict.size else math.inf
        return SmoothingCertificate(
            identity_zone=identity_ok,
            constant_ends=ends_ok,
            nonincreasing=bool(np.all(dh <= 0)),
            curvature_bound=bool(np.all(excess <= tol)) and min_strict > 0,
            min_strict_margin=min_strict,
            max_excess=float(np.max(excess)),
        )


def _side_flags(side):
    if side not in SIDES:
        raise DomainError(f"side must be one of {SIDES}")
    return side in ("both", "left-only"), side in ("both", "right-only")


def smooth_potential(ms: ModelSpace, eps: float, side: str = "both", points=10_000) -> SmoothedPotential:
    """Flatten the model potential near the chosen ends and certify the result.

    An end that is not smoothed is instead extended by eps along the model
    family, so the result always lives on [a - eps, b + eps].
    """
    left, right = _side_flags(side)
    a, b = ms.a, ms.b
    if not 0 < eps < (b - a) / 2:
        raise CertificateError(f"eps={eps!r} not in (0, {(b - a) / 2!r})")
    ext_a = a if left else a - eps
    ext_b = b if right else b + eps
    try:
        model = ms.with_domain(ext_a, ext_b) if (ext_a, ext_b) != (a, b) else ms
    except DomainError as exc:
        raise CertificateError(f"cannot extend the model by eps={eps!r}: {exc}") from exc
    cutoff = CutoffProfile(a, b, float(eps), left, right)
    sp = SmoothedPotential(model, cutoff, side, a, b, float(eps), ms.constant_curvature)
    cert = sp.certify(points)
    if not cert.passed:
        raise CertificateError(f"smoothing certificate failed: {cert}")
    return sp


@dataclass(frozen=True)
class BandCoordinate:
    """Affine beta: [0, d'] -> [lo, hi] with slope (hi - lo)/d' < 1."""

    source_width: float
    lo: float
    hi: float

    @property
    def lipschitz(self) -> float:
        return (self.hi - self.lo) / self.source_width

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.lo + self.lipschitz * x
        # pin the ends exactly so clamped pieces hit their constant values
        out = np.where(x <= 0, self.lo, np.where(x >= self.source_width, self.hi, out))
        return out


def band_coordinate(source_width: float, target) -> BandCoordinate:
    lo, hi = map(float, target)
    if not source_width > hi - lo:
        raise WidthError(
            f"band width {source_width!r} does not exceed target length {hi - lo!r}"
        )
    return BandCoordinate(float(source_width), lo, hi)


@dataclass(frozen=True)
class PartitionedBandSpec:
    """Measured data of a band cut into k + 1 segments."""

    n: int
    widths: tuple
    scal_lower: tuple
    H_minus: float = 0.0
    H_plus: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "widths", tuple(float(w) for w in self.widths))
        object.__setattr__(self, "scal_lower", tuple(float(s) for s in self.scal_lower))
        if len(self.widths) == 0 or len(self.widths) != len(self.scal_lower):
            raise DomainError("need one width and one scal bound per segment")
        if not all(w > 0 for w in self.widths):
            raise DomainError("segment widths must be positive")

    @property
    def k(self) -> int:
        return len(self.widths) - 1


@dataclass(frozen=True)
class AssembledPotential:
    n: int
    pieces: tuple
    eps: float
    eps_trail: tuple = field(default=(), compare=False)

    @property
    def widths(self):
        return np.array([bc.source_width for _, bc in self.pieces])

    @property
    def offsets(self):
        return np.concatenate([[0.0], np.cumsum(self.widths)])

    @property
    def length(self) -> float:
        return float(self.offsets[-1])

    def segment_of(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.offsets, x, side="right") - 1
        return np.clip(idx, 0, len(self.pieces) - 1)

    def _eval(self, x, deriv):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0) or np.any(x > self.length):
            raise DomainError("x outside the band coordinate range")
        seg = self.segment_of(x)
        out = np.empty_like(x)
        offs = self.offsets
        for j, (sp, bc) in enumerate(self.pieces):
            m = seg == j
            if np.any(m):
                y = bc(x[m] - offs[j])
                out[m] = sp.derivative(y) * bc.lipschitz if deriv else sp.value(y)
        return float(out) if out.ndim == 0 else out

    def value(self, x):
        return self._eval(x, False)

    def gradient(self, x):
        """dh/dx along the band coordinate (chain rule through beta)."""
        return self._eval(x, True)

    def segment_grid(self, j, points):
        sp, bc = self.pieces[j]
        local = np.linspace(0.0, bc.source_width, points)
        y = bc(local)
        return (
            self.offsets[j] + local,
            sp.value(y),
            sp.derivative(y) * bc.lipschitz,
        )

    def junction_mismatch(self):
        out = []
        for (sp_l, bc_l), (sp_r, bc_r) in zip(self.pieces[:-1], self.pieces[1:]):
            left = sp_l.value(bc_l(bc_l.source_width))
            right = sp_r.value(bc_r(0.0))
            out.append(abs(float(left) - float(right)))
        return np.array(out)


@dataclass(frozen=True)
class ConstantPotential:
    """h = c on a band of the given segment widths (for boundary cases)."""

    c: float
    widths_: tuple

    @property
    def widths(self):
        return np.asarray(self.widths_, dtype=float)

    @property
    def offsets(self):
        return np.concatenate([[0.0], np.cumsum(self.widths)])

    @property
    def length(self):
        return float(self.offsets[-1])

    def value(self, x):
        return np.full_like(np.asarray(x, dtype=float), self.c)

    def gradient(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def segment_grid(self, j, points):
        x = np.linspace(self.offsets[j], self.offsets[j + 1], points)
        return x, self.value(x), self.gradient(x)


@dataclass(frozen=True)
class ConditionCertificate:
    x: np.ndarray
    h: np.ndarray
    grad: np.ndarray
    margin: np.ndarray
    segment: np.ndarray
    min_margin: float
    argmin_x: float
    boundary_margins: tuple

    @property
    def passed(self) -> bool:
        return self.min_margin > 0 and all(m > 0 for m in self.boundary_margins)


def verify_conditions(h, spec: PartitionedBandSpec, points_per_segment=2000) -> ConditionCertificate:
    """Pointwise margins of the two mu-bubble conditions.

    margin = scal_lower + n/(n-1) h^2 - 2|grad h| on every segment grid;
    barrier margins are H(d-X) + h(0) and H(d+X) - h(end).
    """
    n = spec.n
    xs, hs, gs, ms, segs = [], [], [], [], []
    for j, scal in enumerate(spec.scal_lower):
        x, hv, g = h.segment_grid(j, points_per_segment)
        margin = scal + n / (n - 1) * hv**2 - 2 * np.abs(g)
        xs.append(x), hs.append(hv), gs.append(g), ms.append(margin)
        segs.append(np.full(x.shape, j + 1))
    x, hv, g, margin, seg = map(np.concatenate, (xs, hs, gs, ms, segs))
    i = int(np.argmin(margin))
    h0 = float(h.value(0.0))
    h1 = float(h.value(h.length))
    return ConditionCertificate(
        x=x,
        h=hv,
        grad=g,
        margin=margin,
        segment=seg,
        min_margin=float(margin[i]),
        argmin_x=float(x[i]),
        boundary_margins=(spec.H_minus + h0, spec.H_plus - h1),
    )


def _sides(k):
    if k == 0:
        return ["none"]
    return ["right-only"] + ["both"] * (k - 1) + ["left-only"]


def _extension_room(ms: ModelSpace, side: str) -> float:
    lo, hi = ms.warping.singular_interval()
    room = math.inf
    if side in ("right-only", "none"):
        room = min(room, ms.a - lo)
    if side in ("left-only", "none"):
        room = min(room, hi - ms.b)
    return room


def check_matching(models, tol=MATCH_TOL):
    for j in range(len(models) - 1):
        left = potential_of(models[j], models[j].b)
        right = potential_of(models[j + 1], models[j + 1].a)
        if abs(left - right) > tol:
            raise MatchError(
                f"H(d+M_{j + 1}) = {left!r} but -H(d-M_{j + 2}) = {right!r} "
                f"(mismatch {abs(left - right):.3e})"
            )


def _build_pieces(spec, models, eps, points):
    pieces = []
    for j, (ms, side) in enumerate(zip(models, _sides(spec.k))):
        sp = smooth_potential(ms, eps, side, points)
        pieces.append((sp, band_coordinate(spec.widths[j], sp.domain)))
    return tuple(pieces)


def default_eps(spec, models):
    """Starting eps for the feasibility search."""
    sides = _sides(spec.k)
    mw = [width_of(m) for m in models]
    surplus = [w - m for w, m in zip(spec.widths, mw)]
    room = [_extension_room(m, s) for m, s in zip(models, sides)]
    return min(0.05 * min(mw), 0.25 * min(surplus), 0.5 * min(room))


def assemble(spec: PartitionedBandSpec, models, eps=None, points=10_000) -> AssembledPotential:
    """Glue the smoothed model potentials along the partitioned band."""
    models = list(models)
    if len(models) != spec.k + 1:
        raise DomainError(f"expected {spec.k + 1} models, got {len(models)}")
    if any(m.n != spec.n for m in models):
        raise DomainError("model dimensions differ from the band dimension")
    check_matching(models)
    for j, (w, m) in enumerate(zip(spec.widths, models)):
        if not w > width_of(m):
            raise WidthError(
                f"segment {j + 1}: width {w!r} does not exceed model width {width_of(m)!r}"
            )
    if eps is not None:
        return AssembledPotential(spec.n, _build_pieces(spec, models, eps, points), float(eps))

    # halve eps until every margin clears MARGIN_TARGET; keep the best otherwise
    eps = default_eps(spec, models)
    trail = []
    best = None
    for _ in range(40):
        try:
            pieces = _build_pieces(spec, models, eps, points)
        except CertificateError:
            trail.append((eps, -math.inf))
            eps /= 2
            continue
        pot = AssembledPotential(spec.n, pieces, eps)
        cert = verify_conditions(pot, spec)
        score = min(cert.min_margin, *cert.boundary_margins)
        trail.append((eps, score))
        if best is None or score > best[0]:
            best = (score, pot)
        if score >= MARGIN_TARGET:
            break
        eps /= 2
    if best is None:
        raise CertificateError(f"no eps in the search produced a valid smoothing: {trail}")
    pot = best[1]
    return AssembledPotential(pot.n, pot.pieces, pot.eps, tuple(trail))


@dataclass(frozen=True)
class SegmentMatch:
    """Cap model next to the spherical core, as in the capped band-width bounds.

    For the minus side ``t_boundary`` is t_- and the cap is [t_-, ell + delta_outer];
    for the plus side it is t_+ < 0 and the cap is [-(ell + delta_outer), t_+].
    """

    family: str
    side: str
    ell: float
    delta_inner: float
    delta_outer: float
    endpoint: float
    t_boundary: float
    model: ModelSpace


def _cap_potential(n, family, sigma):
    if family == "cone":
        return lambda t: 2 * (n - 1) / (n * t), 0.0
    if family == "hyperbolic":
        amp = math.sqrt(sigma * (n - 1) / n)
        rate = math.sqrt(sigma * n) / (2 * math.sqrt(n - 1))
        return (lambda t: amp / math.tanh(rate * t)), amp
    raise DomainError(f"cap family must be cone or hyperbolic, not {family!r}")


def match_segments(
    n,
    kappa,
    d,
    family="cone",
    sigma=None,
    H_boundary=math.inf,
    delta_inner=None,
    side="minus",
) -> SegmentMatch:
    """Solve h_core(+-(d - delta_inner)/2) = h_cap(endpoint) for the cap endpoint.

    The core is the spherical model of curvature kappa n (n-1); the cap is a
    cone (scalar flat) or hyperbolic (scal = -sigma) model. t_- is the largest
    value with h_cap(t_-) >= -H_boundary, capped at half the endpoint; delta_inner
    is halved until delta_outer < t_-.
    """
    from .comparison import ell_negative, ell_nonneg

    dmax = 2 * math.pi / (math.sqrt(kappa) * n)
    if not 0 < d < dmax:
        raise DomainError(f"d={d!r} outside (0, {dmax!r})")
    if family == "hyperbolic":
        if sigma is None or not sigma > 0:
            raise DomainError("hyperbolic caps need sigma > 0")
        ell = ell_negative(n, kappa, sigma, d).value
    else:
        ell = ell_nonneg(n, kappa, d).value
    h_cap, h_inf = _cap_potential(n, family, sigma)
    delta1 = 1e-3 * d if delta_inner is None else float(delta_inner)
    rk = math.sqrt(kappa)
    for _ in range(30):
        a2 = (-d + delta1) / 2
        core = make_spherical(n, kappa, (a2, -a2))
        target = potential_of(core, a2)
        if family == "hyperbolic":
            thr = kappa * n * (n - 1) * math.tan(rk * n * (d - 2 * delta1) / 4) ** 2
            if not sigma < thr or not target > h_inf:
                if delta_inner is not None:
                    raise ThresholdError(
                        f"sigma={sigma!r} not below {thr!r} at delta={delta1!r}", threshold=thr
                    )
                delta1 /= 2
                continue
        try:
            endpoint = roots.solve_decreasing(
                lambda t: h_cap(t) - target, T_FLOOR, max(2 * ell, T_FLOOR * 2)
            )
        except NoRootError as exc:
            raise NoRootError(
                f"matching value h={target!r} has no cap preimage above {T_FLOOR!r}; "
                f"the core potential blows up as d -> {dmax!r}",
                bracket=exc.bracket,
            ) from exc
        need = -H_boundary
        cap_t = 0.5 * endpoint
        if need > h_inf and need > h_cap(cap_t):
            if need > h_cap(T_FLOOR):
                raise NoRootError(
                    f"boundary mean curvature {H_boundary!r} needs t_- below {T_FLOOR!r}",
                    bracket=(T_FLOOR, cap_t),
                )
            a, b = roots.scan_bracket(lambda t: h_cap(t) - need, T_FLOOR, cap_t, geometric=True)
            cap_t = roots.bisect(lambda t: h_cap(t) - need, a, b)
            # stay on the admissible side of the root
            while h_cap(cap_t) < need:
                cap_t = math.nextafter(cap_t, 0.0)
        delta2 = endpoint - ell
        if delta2 < cap_t and endpoint > cap_t:
            break
        if delta_inner is not None:
            raise NoRootError(
                f"delta_outer={delta2!r} is not below t_-={cap_t!r}", bracket=(cap_t, endpoint)
            )
        delta1 /= 2
    else:
        raise NoRootError("could not find admissible delta parameters", bracket=(0.0, delta1))

    if family == "cone":
        cap = make_cone(n, (cap_t, endpoint))
    else:
        cap = make_hyperbolic(n, sigma, (cap_t, endpoint))
    if side == "minus":
        return SegmentMatch(family, side, ell, delta1, delta2, endpoint, cap_t, cap)
    if side == "plus":
        return SegmentMatch(family, side, ell, delta1, delta2, -endpoint, -cap_t, reflect(cap))
    raise DomainError("side must be 'minus' or 'plus'")


def capped_band_models(n, kappa, d, family="cone", sigma=None, H_minus=math.inf, H_plus=math.inf, delta=None):
    """Three matched models (cap, spherical core, reflected cap).

    Returns the models and the two SegmentMatch records.
    """
    left = match_segments(n, kappa, d, family, sigma, H_minus, delta, "minus")
    right = match_segments(n, kappa, d, family, sigma, H_plus, delta, "plus")
    core = make_spherical(n, kappa, ((-d + left.delta_inner) / 2, (d - right.delta_inner) / 2))
    return [left.model, core, right.model], (left, right)
