"""Bracket scanning plus bisection for monotone scalar equations."""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize

from .errors import NoRootError

SCAN_SUBDIVISIONS = 64
MAX_ITER = 200
# scipy's bisect refuses rtol below 4 ulp; this is far inside the 1e-12 budget.
RTOL = 4 * np.finfo(float).eps


def scan_bracket(f, lo, hi, subdivisions=SCAN_SUBDIVISIONS, geometric=False):
    """Return the first sub-interval of [lo, hi] on which f changes sign."""
    if geometric:
        if lo <= 0:
            raise ValueError("geometric scan needs lo > 0")
        pts = np.geomspace(lo, hi, subdivisions + 1)
    else:
        pts = np.linspace(lo, hi, subdivisions + 1)
    prev_x, prev_f = pts[0], f(pts[0])
    if prev_f == 0.0:
        return prev_x, prev_x
    for x in pts[1:]:
        fx = f(x)
        if fx == 0.0:
            return x, x
        if math.copysign(1.0, fx) != math.copysign(1.0, prev_f):
            return prev_x, x
        prev_x, prev_f = x, fx
    raise NoRootError(
        f"no sign change on [{lo!r}, {hi!r}] "
        f"(f(lo)={f(lo)!r}, f(hi)={f(hi)!r})",
        bracket=(lo, hi),
    )


def bisect(f, lo, hi, rtol=RTOL, maxiter=MAX_ITER):
    """Root of f inside a sign-change bracket."""
    if lo == hi:
        return float(lo)
    return float(
        optimize.bisect(f, lo, hi, xtol=1e-300, rtol=rtol, maxiter=maxiter)
    )


def solve_decreasing(f, lo, hi_start, hi_max=1e12, geometric=True):
    """Root of a decreasing f on (lo, inf).

    The upper end is doubled from ``hi_start`` until f turns negative, then
    the bracket is refined by scanning and bisection.
    """
    if f(lo) < 0:
        raise NoRootError(
            f"f is already negative at the lower end {lo!r}", bracket=(lo, hi_start)
        )
    hi = hi_start
    while f(hi) > 0:
        hi *= 2.0
        if hi > hi_max:
            raise NoRootError(
                f"f stays positive up to {hi_max!r}; root diverges",
                bracket=(lo, hi_max),
            )
    a, b = scan_bracket(f, lo, hi, geometric=geometric and lo > 0)
    return bisect(f, a, b)
