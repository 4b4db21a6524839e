"""Shared numerical primitives: deterministic reductions and 1-D searches.

All reductions used for reported values go through :func:`pairwise_sum`, which
fixes the summation tree (index-ascending, adjacent pairing).  The result is
therefore bit-stable across runs and independent of how the summands were
produced (serial or parallel).
"""

from __future__ import annotations

import numpy as np

from .errors import EvaluationError

__all__ = [
    "pairwise_sum",
    "pairwise_mean",
    "bisect_decreasing",
    "golden_section",
    "midpoint_u",
]


def pairwise_sum(values) -> float:
    """Sum an array by adjacent pairing in index-ascending order.

    Zero-padding to the next power of two does not change the result, and the
    fixed tree makes the reduction order a contract rather than an
    implementation detail.
    """
    a = np.asarray(values, dtype=float).ravel()
    n = a.size
    if n == 0:
        return 0.0
    width = 1 << (n - 1).bit_length()
    if width != n:
        a = np.concatenate([a, np.zeros(width - n)])
    while a.size > 1:
        a = a[0::2] + a[1::2]
    return float(a[0])


def pairwise_mean(values) -> float:
    a = np.asarray(values, dtype=float).ravel()
    if a.size == 0:
        raise EvaluationError("mean of an empty array")
    return pairwise_sum(a) / a.size


def midpoint_u(m: int, delta: float = 0.0) -> np.ndarray:
    """Midpoint nodes u_i = (i - 1/2)/m clipped into [delta, 1 - delta]."""
    u = (np.arange(1, m + 1) - 0.5) / m
    if delta > 0.0:
        u = np.clip(u, delta, 1.0 - delta)
    return u


def bisect_decreasing(
    f,
    lo: float,
    hi: float,
    target: float = 0.0,
    width_tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of ``f(x) = target`` for a non-increasing ``f`` on ``[lo, hi]``.

    Requires ``f(lo) >= target >= f(hi)``.  Bisection runs until the bracket
    width falls below ``width_tol * (1 + |lo| + |hi|)``; it is unconditionally
    safe for monotone residuals.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo < target:
        raise EvaluationError(
            f"bisection bracket invalid: f(lo)={flo} below target {target}"
        )
    if fhi > target:
        raise EvaluationError(
            f"bisection bracket invalid: f(hi)={fhi} above target {target}"
        )
    if flo == target:
        return lo
    if fhi == target:
        return hi
    a, b = lo, hi
    tol = width_tol * (1.0 + abs(lo) + abs(hi))
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        if b - a <= tol or mid == a or mid == b:
            break
        fm = f(mid)
        if fm >= target:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0  # 1/phi
_INVPHI2 = (3.0 - np.sqrt(5.0)) / 2.0  # 1/phi^2


def golden_section(f, a: float, b: float, width_tol: float = 1e-8, max_iter: int = 200):
    """Minimiser of a unimodal ``f`` on ``[a, b]`` by golden-section search.

    On ties the right part of the bracket is discarded, so the search drifts
    toward the smallest minimiser of a flat-bottomed objective.
    """
    if b < a:
        a, b = b, a
    h = b - a
    if h <= width_tol:
        return 0.5 * (a + b)
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if h <= width_tol * (1.0 + abs(a) + abs(b)):
            break
        if fc <= fd:  # keep [a, d]; ties move left
            b, d, fd = d, c, fc
            h = b - a
            c = a + _INVPHI2 * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INVPHI * h
            fd = f(d)
    # final pick among probes, preferring the smallest argument on ties
    xs = (a, c, d, b)
    fs = (f(a), fc, fd, f(b))
    best = min(range(4), key=lambda i: (fs[i], xs[i]))
    return xs[best]
