"""Shared numerics: bracketed root finding and adaptive Gauss-Legendre quadrature.

Both are deliberately small and self-contained.  The root finders only ever
see monotone objective functions here (implicit equations coming from strictly
monotone integral transforms), so a guarded bracket is all we need; the hybrid
variant just accelerates the endgame with secant steps for objectives that are
expensive to evaluate (each evaluation may itself run a quadrature).
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "bisect_root",
    "solve_monotone",
    "adaptive_gauss_legendre",
]


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    rel_tol: float = 1e-14,
    abs_tol: float = 0.0,
    max_iter: int = 200,
) -> float:
    """Plain bisection on a bracketing interval [lo, hi].

    Runs until the bracket width drops below ``abs_tol + rel_tol*|mid|`` (by
    default: near machine precision) or ``max_iter`` halvings.  Requires a
    sign change; an endpoint that is exactly zero is returned as-is.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise ValueError(f"no sign change on bracket [{lo}, {hi}]: f={flo}, {fhi}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:  # bracket collapsed to adjacent floats
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if math.copysign(1.0, fmid) == math.copysign(1.0, flo):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        if hi - lo <= abs_tol + rel_tol * abs(mid):
            break
    return 0.5 * (lo + hi)


def solve_monotone(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    rel_tol: float = 1e-14,
    abs_tol: float = 0.0,
    max_iter: int = 200,
) -> float:
    """Bracketed root finder with secant acceleration (regula-falsi hybrid).

    Same contract as :func:`bisect_root` but converges in far fewer calls on
    smooth objectives; every step stays inside the bracket, and a bisection
    step is forced whenever the secant step stalls, so worst-case behavior is
    plain bisection.  Used where one evaluation of ``f`` is itself expensive.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if math.copysign(1.0, flo) == math.copysign(1.0, fhi):
        raise ValueError(f"no sign change on bracket [{lo}, {hi}]: f={flo}, {fhi}")
    side = 0  # which endpoint survived the last step (-1 lo, +1 hi)
    for it in range(max_iter):
        width = hi - lo
        if width <= abs_tol + rel_tol * max(abs(lo), abs(hi)):
            break
        if it % 8 == 7 or not (math.isfinite(flo) and math.isfinite(fhi)):
            mid = 0.5 * (lo + hi)  # periodic safety bisection
        else:
            mid = (lo * fhi - hi * flo) / (fhi - flo)
            if not (lo < mid < hi):
                mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if math.copysign(1.0, fmid) == math.copysign(1.0, flo):
            lo, flo = mid, fmid
            if side == -1:
                fhi *= 0.5  # Illinois trick: unstick the stale endpoint
            side = -1
        else:
            hi, fhi = mid, fmid
            if side == 1:
                flo *= 0.5
            side = 1
    return 0.5 * (lo + hi)


def expand_bracket(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    factor: float = 2.0,
    max_expand: int = 200,
) -> tuple[float, float]:
    """Grow ``hi`` geometrically until f changes sign on [lo, hi]."""
    flo = f(lo)
    for _ in range(max_expand):
        if math.copysign(1.0, f(hi)) != math.copysign(1.0, flo):
            return lo, hi
        lo, hi = hi, hi * factor
    raise ValueError("failed to bracket a sign change")


# --- adaptive Gauss-Legendre ------------------------------------------------

_NODES_LO, _WEIGHTS_LO = leggauss(10)
_NODES_HI, _WEIGHTS_HI = leggauss(21)


def _panel(f, lo: float, hi: float) -> tuple[float, float]:
    """Integral estimate on one panel plus an error estimate (GL10 vs GL21)."""
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    i_lo = half * float(_WEIGHTS_LO @ f(mid + half * _NODES_LO))
    i_hi = half * float(_WEIGHTS_HI @ f(mid + half * _NODES_HI))
    return i_hi, abs(i_hi - i_lo)


def adaptive_gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    *,
    rel_tol: float = 1e-12,
    max_panels: int = 4096,
) -> float:
    """Globally adaptive Gauss-Legendre quadrature of a vectorized integrand.

    Splits the panel with the largest error estimate until the summed error
    estimate is below ``rel_tol`` times the integral magnitude.  ``f`` must
    accept a numpy array of abscissae and return the values elementwise;
    endpoint values are never requested (all nodes are interior), so mild
    endpoint singularities that have been transformed away analytically are
    safe.
    """
    if hi == lo:
        return 0.0
    if hi < lo:
        return -adaptive_gauss_legendre(f, hi, lo, rel_tol=rel_tol, max_panels=max_panels)
    val, err = _panel(f, lo, hi)
    panels = [(err, lo, hi, val)]
    total = val
    total_err = err
    while len(panels) < max_panels:
        if total_err <= rel_tol * max(abs(total), 1e-300):
            break
        worst = max(range(len(panels)), key=lambda i: panels[i][0])
        err, plo, phi, val = panels.pop(worst)
        mid = 0.5 * (plo + phi)
        if mid <= plo or mid >= phi:  # cannot split further in float64
            panels.append((0.0, plo, phi, val))
            total_err -= err
            continue
        v1, e1 = _panel(f, plo, mid)
        v2, e2 = _panel(f, mid, phi)
        panels.append((e1, plo, mid, v1))
        panels.append((e2, mid, phi, v2))
        total += v1 + v2 - val
        total_err += e1 + e2 - err
    return math.fsum(p[3] for p in panels)
