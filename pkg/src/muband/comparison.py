"""Band-width bounds and the partitioned comparison decision procedure."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from . import roots
from .errors import DivergenceWarning, DomainError, HypothesisError, ThresholdError
from .model_spaces import boundary_mean_curvatures, potential_of, width_of
from .potential_assembly import (
    MATCH_TOL,
    AssembledPotential,
    ConditionCertificate,
    PartitionedBandSpec,
    assemble,
    verify_conditions,
)

DIVERGENCE_BAND = 1e-12


@dataclass(frozen=True)
class WidthBound:
    kind: str
    n: int
    kappa: float
    sigma: float
    d: float
    value: float
    residual: float
    divergent: bool = False


def classical_bound(n, kappa=1.0) -> float:
    """2 pi / (sqrt(kappa) n): band width bound under scal >= kappa n (n-1)."""
    if n < 2 or not kappa > 0:
        raise DomainError("need n >= 2 and kappa > 0")
    return 2 * math.pi / (math.sqrt(kappa) * n)


def _core_value(n, kappa, d):
    """sqrt(kappa)(n-1) tan(sqrt(kappa) n d / 4): core potential at -d/2."""
    dmax = classical_bound(n, kappa)
    if not 0 < d < dmax:
        raise DomainError(f"d={d!r} outside (0, {dmax!r})")
    return math.sqrt(kappa) * (n - 1) * math.tan(math.sqrt(kappa) * n * d / 4)


def ell_nonneg(n, kappa, d) -> WidthBound:
    """ell = 2/(sqrt(kappa) n) cot(sqrt(kappa) n d / 4)."""
    lhs = _core_value(n, kappa, d)
    ell = 2 / (math.sqrt(kappa) * n) / math.tan(math.sqrt(kappa) * n * d / 4)
    # the cone potential 2(n-1)/(n ell) has to reproduce the core value
    residual = abs(lhs - 2 * (n - 1) / (n * ell))
    return WidthBound("nonneg-ambient", n, kappa, 0.0, d, ell, residual)


def negative_threshold(n, kappa, d) -> float:
    """Largest admissible sigma: kappa n (n-1) tan(sqrt(kappa) n d / 4)^2."""
    return n / (n - 1) * _core_value(n, kappa, d) ** 2


def ell_negative(n, kappa, sigma, d) -> WidthBound:
    """Solve sqrt(kappa)(n-1) tan(.) = sqrt(sigma(n-1)/n) coth(sqrt(sigma n) ell / (2 sqrt(n-1)))."""
    lhs = _core_value(n, kappa, d)
    thr = n / (n - 1) * lhs**2
    if not sigma > 0:
        raise ThresholdError("sigma must be positive", threshold=thr)
    if sigma > thr:
        raise ThresholdError(f"sigma={sigma!r} exceeds the threshold {thr!r}", threshold=thr)
    if thr - sigma <= DIVERGENCE_BAND * max(1.0, thr):
        warnings.warn(
            f"sigma={sigma!r} within {DIVERGENCE_BAND} of the threshold {thr!r}; ell diverges",
            DivergenceWarning,
            stacklevel=2,
        )
        return WidthBound("negative-ambient", n, kappa, sigma, d, math.inf, 0.0, True)
    amp = math.sqrt(sigma * (n - 1) / n)
    rate = math.sqrt(sigma * n) / (2 * math.sqrt(n - 1))

    def f(ell):
        return amp / math.tanh(rate * ell) - lhs

    # the sigma -> 0 value is a natural first guess for the bracket
    guess = 2 * (n - 1) / (n * lhs)
    ell = roots.solve_decreasing(f, min(guess, 1.0) * 1e-6, max(guess, 1e-300), hi_max=1e300)
    return WidthBound("negative-ambient", n, kappa, sigma, d, ell, abs(f(ell)))


@dataclass(frozen=True)
class ContradictionCertificate:
    potential: AssembledPotential
    conditions: ConditionCertificate
    note: str = (
        "analytic side only: the band's separation property is declared, not verified"
    )

    @property
    def positive(self) -> bool:
        return self.conditions.passed


@dataclass(frozen=True)
class ComparisonVerdict:
    pairs: tuple
    index: int | None = None
    certificate: ContradictionCertificate | None = None

    def __post_init__(self):
        if (self.index is None) == (self.certificate is None):
            raise ValueError("a verdict carries exactly one of index / certificate")


def check_hypotheses(spec: PartitionedBandSpec, models, tol=MATCH_TOL):
    """Raise HypothesisError naming the first violated comparison hypothesis."""
    models = list(models)
    if len(models) != spec.k + 1:
        raise HypothesisError(f"expected {spec.k + 1} models, got {len(models)}", condition=0)
    for j, (scal, m) in enumerate(zip(spec.scal_lower, models)):
        sigma = m.constant_curvature
        if scal < sigma - tol * (1 + abs(sigma)):
            raise HypothesisError(
                f"hypothesis 1: scal(V_{j + 1}) >= {scal!r} is below model curvature {sigma!r}",
                condition=1,
            )
    h_minus, _ = boundary_mean_curvatures(models[0])
    _, h_plus = boundary_mean_curvatures(models[-1])
    if spec.H_minus < h_minus - tol:
        raise HypothesisError(
            f"hypothesis 2: H(d-X) >= {spec.H_minus!r} is below H(d-M_1) = {h_minus!r}", condition=2
        )
    if spec.H_plus < h_plus - tol:
        raise HypothesisError(
            f"hypothesis 2: H(d+X) >= {spec.H_plus!r} is below H(d+M_k+1) = {h_plus!r}", condition=2
        )
    for j in range(spec.k):
        left = potential_of(models[j], models[j].b)
        right = potential_of(models[j + 1], models[j + 1].a)
        if abs(left - right) > tol:
            raise HypothesisError(
                f"hypothesis 3: H(d+M_{j + 1}) = {left!r} != -H(d-M_{j + 2}) = {right!r}",
                condition=3,
            )


def evaluate_partitioned(spec: PartitionedBandSpec, models, eps=None) -> ComparisonVerdict:
    """Either the smallest segment j with width(V_j) <= width(M_j), or a
    contradiction certificate when every segment is strictly wider."""
    models = list(models)
    check_hypotheses(spec, models)
    pairs = tuple((w, width_of(m)) for w, m in zip(spec.widths, models))
    for j, (measured, model) in enumerate(pairs):
        if measured <= model:
            return ComparisonVerdict(pairs, index=j + 1)
    pot = assemble(spec, models, eps)
    cert = ContradictionCertificate(pot, verify_conditions(pot, spec))
    return ComparisonVerdict(pairs, certificate=cert)
