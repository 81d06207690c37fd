"""Warped-product model spaces N x [a, b] with metric phi(t)^2 g_N + dt^2.

The fiber N is closed and scalar flat; it only enters through its volume.
Three analytic warping families are provided together with a
spline-backed family built from samples:

* spherical   phi(t) = cos(sqrt(kappa) n t / 2)^(2/n),   scal = kappa n (n-1)
* cone        phi(t) = t^(2/n),                           scal = 0
* hyperbolic  phi(t) = sinh(sqrt(sigma n) t / (2 sqrt(n-1)))^(2/n), scal = -sigma

Everything is expressed through the potential h = (n-1) phi'/phi, which is
also the mean curvature of the slices N x {t} w.r.t. -d/dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import CertificateError, DomainError

GRID_POINTS = 10_000
LOG_CONCAVITY_MARGIN = 1e-10
FAMILIES = ("spherical", "cone", "hyperbolic", "custom")


@dataclass(frozen=True)
class Fiber:
    kind: str = "flat-torus"
    volume: float = 1.0


@dataclass(frozen=True, eq=False)
class WarpingFunction:
    """A strictly log-concave warping function on [a, b].

    ``reflected`` stores phi(-t) of the base family, so the domain of a
    reflected cone is [a, b] with b < 0.
    """

    family: str
    n: int
    a: float
    b: float
    kappa: float = 0.0
    sigma: float = 0.0
    reflected: bool = False
    samples: tuple | None = None
    _spline: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown warping family {self.family!r}")
        if self.family == "custom" and self._spline is None:
            t, phi = (np.asarray(s, dtype=float) for s in self.samples)
            object.__setattr__(self, "_spline", CubicSpline(t, phi))

    def __eq__(self, other):
        if not isinstance(other, WarpingFunction):
            return NotImplemented
        same = (
            self.family == other.family
            and self.n == other.n
            and self.a == other.a
            and self.b == other.b
            and self.kappa == other.kappa
            and self.sigma == other.sigma
            and self.reflected == other.reflected
        )
        if not same or self.samples is None or other.samples is None:
            return same and self.samples is None and other.samples is None
        return all(
            np.array_equal(x, y) for x, y in zip(self.samples, other.samples)
        )

    __hash__ = None

    # base-family coordinate: s = -t for reflected copies
    def _s(self, t):
        return -t if self.reflected else t

    def _base_h(self, s):
        n = self.n
        if self.family == "spherical":
            rk = math.sqrt(self.kappa)
            return -rk * (n - 1) * np.tan(rk * n * s / 2)
        if self.family == "cone":
            return 2 * (n - 1) / (n * s)
        if self.family == "hyperbolic":
            amp, rate = _hyperbolic_constants(n, self.sigma)
            return amp / np.tanh(rate * s)
        spline = self._spline
        return (n - 1) * spline(s, 1) / spline(s)

    def _base_dh(self, s):
        n = self.n
        if self.family == "spherical":
            rk = math.sqrt(self.kappa)
            return -self.kappa * n * (n - 1) / 2 / np.cos(rk * n * s / 2) ** 2
        if self.family == "cone":
            return -2 * (n - 1) / (n * s**2)
        if self.family == "hyperbolic":
            amp, rate = _hyperbolic_constants(n, self.sigma)
            return -amp * rate / np.sinh(rate * s) ** 2
        return _central_difference(self._base_h, s, self._sample_range())

    def _base_phi(self, s):
        n = self.n
        if self.family == "spherical":
            return np.cos(math.sqrt(self.kappa) * n * s / 2) ** (2 / n)
        if self.family == "cone":
            return s ** (2 / n)
        if self.family == "hyperbolic":
            _, rate = _hyperbolic_constants(self.n, self.sigma)
            return np.sinh(rate * s) ** (2 / n)
        return self._spline(s)

    def _sample_range(self):
        t = self.samples[0]
        return float(t[0]), float(t[-1])

    def phi(self, t):
        return self._base_phi(self._s(np.asarray(t, dtype=float)))

    def log_derivative(self, t):
        """(log phi)'(t) = phi'/phi."""
        return self.potential(t) / (self.n - 1)

    def dphi(self, t):
        return self.phi(t) * self.log_derivative(t)

    def ddphi(self, t):
        q = self.log_derivative(t)
        return self.phi(t) * (q**2 + self.potential_derivative(t) / (self.n - 1))

    def potential(self, t):
        s = self._s(np.asarray(t, dtype=float))
        h = self._base_h(s)
        return -h if self.reflected else h

    def potential_derivative(self, t):
        # h_r(t) = -h(-t)  =>  h_r'(t) = h'(-t)
        return self._base_dh(self._s(np.asarray(t, dtype=float)))

    def singular_interval(self):
        """Open interval of t on which the family is smooth and positive."""
        if self.family == "spherical":
            half = math.pi / (math.sqrt(self.kappa) * self.n)
            return -half, half
        if self.family in ("cone", "hyperbolic"):
            return (-math.inf, 0.0) if self.reflected else (0.0, math.inf)
        lo, hi = self._sample_range()
        return (-hi, -lo) if self.reflected else (lo, hi)


def _hyperbolic_constants(n, sigma):
    amp = math.sqrt(sigma * (n - 1) / n)
    rate = math.sqrt(sigma * n) / (2 * math.sqrt(n - 1))
    return amp, rate


def _central_difference(f, s, bounds):
    s = np.asarray(s, dtype=float)
    lo, hi = bounds
    step = np.cbrt(np.finfo(float).eps) * np.maximum(1.0, np.abs(s))
    step = np.minimum(step, (hi - lo) / 4)
    left = np.maximum(s - step, lo)
    right = np.minimum(s + step, hi)
    return (f(right) - f(left)) / (right - left)


@dataclass(frozen=True)
class ModelSpace:
    n: int
    warping: WarpingFunction
    fiber: Fiber = Fiber()

    @property
    def a(self) -> float:
        return self.warping.a

    @property
    def b(self) -> float:
        return self.warping.b

    @property
    def family(self) -> str:
        return self.warping.family

    @property
    def constant_curvature(self) -> float:
        """Closed-form scalar curvature of the named families."""
        w = self.warping
        if w.family == "spherical":
            return w.kappa * self.n * (self.n - 1)
        if w.family == "cone":
            return 0.0
        if w.family == "hyperbolic":
            return -w.sigma
        grid = np.linspace(w.a, w.b, 257)
        return float(np.median(scalar_curvature_of(self, grid)))

    def with_domain(self, a: float, b: float) -> "ModelSpace":
        """Same warping family on another interval (re-validated)."""
        return _build(self.n, replace(self.warping, a=float(a), b=float(b)), self.fiber)


def _check_domain(ms: ModelSpace, t):
    t = np.asarray(t, dtype=float)
    if np.any(t < ms.a) or np.any(t > ms.b) or np.any(np.isnan(t)):
        raise DomainError(f"t outside model domain [{ms.a!r}, {ms.b!r}]")
    return t


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def potential_of(ms: ModelSpace, t):
    """h_phi(t) = (n-1) phi'(t)/phi(t)."""
    return _scalar(ms.warping.potential(_check_domain(ms, t)))


def potential_derivative_of(ms: ModelSpace, t):
    return _scalar(ms.warping.potential_derivative(_check_domain(ms, t)))


def scalar_curvature_of(ms: ModelSpace, t):
    """Scalar curvature of the warped product at t, -n/(n-1) h^2 - 2 h'."""
    t = _check_domain(ms, t)
    n = ms.n
    h = ms.warping.potential(t)
    dh = ms.warping.potential_derivative(t)
    return _scalar(-n / (n - 1) * h**2 - 2 * dh)


def boundary_mean_curvatures(ms: ModelSpace) -> tuple[float, float]:
    """(H_-, H_+) w.r.t. the interior unit normal: (-h(a), h(b))."""
    return -potential_of(ms, ms.a), potential_of(ms, ms.b)


def width_of(ms: ModelSpace) -> float:
    return ms.b - ms.a


def _build(n, warping, fiber=Fiber(), grid_points=GRID_POINTS) -> ModelSpace:
    if not 2 <= n <= 7:
        raise DomainError(f"dimension n={n} outside 2..7")
    a, b = warping.a, warping.b
    if not b > a:
        raise DomainError(f"degenerate interval [{a!r}, {b!r}]")
    lo, hi = warping.singular_interval()
    if warping.family == "custom":
        if a < lo or b > hi:
            raise DomainError(f"[{a!r}, {b!r}] leaves the sampled range ({lo!r}, {hi!r})")
    elif not (lo < a and b < hi):
        raise DomainError(
            f"[{a!r}, {b!r}] must lie strictly inside ({lo!r}, {hi!r})"
        )
    ms = ModelSpace(n, warping, fiber)
    grid = np.linspace(a, b, grid_points)
    if not np.all(warping.phi(grid) > 0):
        raise CertificateError("warping function is not positive on the domain")
    if warping.family == "custom":
        _certify_custom(warping)
    else:
        concavity = warping.potential_derivative(grid) / (n - 1)
        if not np.all(concavity < 0):
            raise CertificateError("warping function is not strictly log-concave")
    return ms


def _certify_custom(w: WarpingFunction):
    t = np.asarray(w.samples[0], dtype=float)
    mid = 0.5 * (t[1:] + t[:-1])
    mid = mid[(mid >= (-w.b if w.reflected else w.a)) & (mid <= (-w.a if w.reflected else w.b))]
    sp = w._spline
    phi, d1, d2 = sp(mid), sp(mid, 1), sp(mid, 2)
    concavity = (d2 * phi - d1**2) / phi**2
    if not np.all(concavity < -LOG_CONCAVITY_MARGIN):
        worst = float(np.max(concavity))
        raise CertificateError(
            f"sampled warping fails strict log-concavity (max (log phi)'' = {worst:.3e})"
        )


def make_spherical(n: int, kappa: float, interval, fiber=Fiber()) -> ModelSpace:
    if not kappa > 0:
        raise DomainError("kappa must be positive")
    a, b = map(float, interval)
    return _build(n, WarpingFunction("spherical", n, a, b, kappa=float(kappa)), fiber)


def make_cone(n: int, interval, fiber=Fiber()) -> ModelSpace:
    a, b = map(float, interval)
    if not a > 0:
        raise DomainError("cone models need t_- > 0")
    return _build(n, WarpingFunction("cone", n, a, b), fiber)


def make_hyperbolic(n: int, sigma: float, interval, fiber=Fiber()) -> ModelSpace:
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    a, b = map(float, interval)
    if not a > 0:
        raise DomainError("hyperbolic models need t_- > 0")
    return _build(n, WarpingFunction("hyperbolic", n, a, b, sigma=float(sigma)), fiber)


def make_custom(n: int, t_samples, phi_samples, interval=None, fiber=Fiber()) -> ModelSpace:
    """Model from (t, phi) samples; derivatives come from a cubic spline."""
    t = np.asarray(t_samples, dtype=float)
    phi = np.asarray(phi_samples, dtype=float)
    if t.ndim != 1 or t.shape != phi.shape or t.size < 4:
        raise DomainError("need at least four matching (t, phi) samples")
    if not np.all(np.diff(t) > 0):
        raise DomainError("sample abscissae must be strictly increasing")
    a, b = (t[0], t[-1]) if interval is None else map(float, interval)
    return _build(n, WarpingFunction("custom", n, float(a), float(b), samples=(t, phi)), fiber)


def reflect(ms: ModelSpace) -> ModelSpace:
    """The model with warping t -> phi(-t) on [-b, -a]."""
    w = ms.warping
    flipped = replace(w, a=-w.b, b=-w.a, reflected=not w.reflected)
    return ModelSpace(ms.n, flipped, ms.fiber)
