"""Boundary asymptotics and law-comparison machinery for general row laws.

Near the y-axis the shape has a universal two-term form mu + 2 sigma sqrt(a)
built from the annealed moments; near the x-axis only a pair of explicit
upper/lower constructions is available.  A coupling bound controls how much
the shape can move when the row laws are perturbed, and ``check_assumptions``
evaluates the integral conditions under which any of this applies.

All integrals are computed piecewise-exactly where the catalog allows and by
adaptive quadrature elsewhere; supports are a finite union of intervals with
exponential right tails, so the unbounded part is swept by doubling panels
until it stops contributing.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .envmodel import (
    EnvironmentLaw,
    Exponential,
    cdf,
    cdf_breakpoints,
    env_moments,
    mean_var,
    support_bounds,
)
from .quadrature import adaptive_gauss_legendre

__all__ = [
    "AsymptoteSpec",
    "ComparisonBound",
    "ConditionCheck",
    "AssumptionReport",
    "psi_near_yaxis",
    "psi_near_xaxis_bounds",
    "comparison_bound",
    "check_assumptions",
]


@dataclass(frozen=True)
class AsymptoteSpec:
    """A boundary-expansion request: which axis, which law, how far out."""

    law: EnvironmentLaw
    axis: str  # "near-y-axis" for (alpha, 1), "near-x-axis" for (1, alpha)
    alpha: float

    def __post_init__(self):
        if self.axis not in ("near-y-axis", "near-x-axis"):
            raise ValueError(f"unknown axis {self.axis!r}")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")


def psi_near_yaxis(law: EnvironmentLaw, alpha: float) -> float:
    """Universal two-term expansion of the shape at (alpha, 1).

    Returns mu + 2 sigma sqrt(alpha) with mu the mean row mean and sigma^2
    the mean row variance; the correction after these two terms is O(alpha).
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    mu, var = env_moments(law)
    if not math.isfinite(var):
        raise ValueError("law has infinite mean row variance")
    return mu + 2.0 * math.sqrt(var) * math.sqrt(alpha)


def psi_near_xaxis_bounds(law: EnvironmentLaw, alpha: float) -> tuple[float, float]:
    """Explicit (lower, upper) envelopes for the shape at (1, alpha).

    Both constants come from constructive arguments, not from the (unknown)
    true asymptotic constant: the upper bound spends 2 sqrt(alpha) times the
    *sum* of all component standard deviations; the lower bound follows the
    best single component — restrict the path to rows of the maximal-mean
    state, which thins the vertical scale by that state's frequency w, giving
    mu* + 2 sigma* sqrt(w alpha).  With one component both collapse to the
    homogeneous-row expansion.  A tie in the maximal mean is broken by the
    first maximizer and reported as a warning.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    stats = [mean_var(dist) for dist in law.dists]
    means = [m for m, _ in stats]
    mu_star = max(means)
    ties = [i for i, m in enumerate(means) if m == mu_star]
    if len(ties) > 1:
        warnings.warn(
            f"maximal row mean {mu_star} is tied between components {ties}; "
            "using the first for the lower bound",
            stacklevel=2,
        )
    i_star = ties[0]
    sigmas = [math.sqrt(v) for _, v in stats]
    w_star = float(law.weights[i_star])
    upper = mu_star + 2.0 * math.sqrt(alpha) * sum(sigmas)
    lower = mu_star + 2.0 * sigmas[i_star] * math.sqrt(w_star * alpha)
    return lower, upper


# --- integration helpers --------------------------------------------------------


def _segments(points: list[float]) -> list[tuple[float, float]]:
    uniq = sorted(set(points))
    return [(a, b) for a, b in zip(uniq, uniq[1:]) if b > a]


def _integral_with_tail(f, points: list[float], unbounded: bool) -> float:
    """Integrate a vectorized f >= 0 over [min(points), oo) split at points.

    Beyond the last breakpoint the integrand is a mix of exponential tails,
    so panels of doubling width are added until one contributes less than
    1e-13 of the running total (or 200 panels, at which point the integral
    is declared divergent).
    """
    total = 0.0
    for a, b in _segments(points):
        total += adaptive_gauss_legendre(f, a, b, rel_tol=1e-11)
    if not unbounded:
        return total
    start = max(points)
    width = max(1.0, abs(start))
    for _ in range(200):
        piece = adaptive_gauss_legendre(f, start, start + width, rel_tol=1e-10)
        total += piece
        if piece <= 1e-13 * max(total, 1e-30):
            return total
        start += width
        width *= 2.0
    return math.inf


def _has_improper(law: EnvironmentLaw) -> bool:
    return any(isinstance(d, Exponential) and d.improper for d in law.dists)


def _law_breakpoints(law: EnvironmentLaw) -> list[float]:
    pts: list[float] = []
    for dist in law.dists:
        pts.extend(cdf_breakpoints(dist))
    return pts


def _right_unbounded(law: EnvironmentLaw) -> bool:
    return any(math.isinf(support_bounds(d)[1]) for d in law.dists
               if not (isinstance(d, Exponential) and d.improper))


# --- comparison bound -----------------------------------------------------------


@dataclass(frozen=True)
class ComparisonBound:
    """How far apart two row laws can push the shape near the y-axis.

    The guarantee packaged here: the shape difference at (alpha, 1) deviates
    from ``mean_gap`` by at most ``term1 + term2``, where term1 integrates
    the square root of the mean CDF discrepancy (scaled by 8 sqrt(alpha))
    and term2 integrates its essential supremum (scaled by alpha).  The
    bound is symmetric: swapping the laws negates mean_gap only.
    """

    law_f: EnvironmentLaw
    law_g: EnvironmentLaw
    alpha: float
    term1: float
    term2: float
    mean_gap: float

    @property
    def total(self) -> float:
        return self.term1 + self.term2


def comparison_bound(law_f: EnvironmentLaw, law_g: EnvironmentLaw,
                     alpha: float) -> ComparisonBound:
    """Couple two row laws state-by-state and bound the shape discrepancy.

    The laws must share the state layout (same component count and weights):
    the coupling holds the row state fixed and compares the conditional
    CDFs, so F's component i is paired with G's component i.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError("alpha must lie in (0, 1]")
    if len(law_f.components) != len(law_g.components):
        raise ValueError("laws must have the same number of components")
    wf, wg = law_f.weights, law_g.weights
    if np.max(np.abs(wf - wg)) > 1e-12:
        raise ValueError("laws must share component weights to be coupled")
    if _has_improper(law_f) or _has_improper(law_g):
        raise ValueError("improper component: comparison integrals diverge")

    dists_f, dists_g = law_f.dists, law_g.dists
    weights = wf

    def mean_abs_gap(x: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(x)
        for w, df, dg in zip(weights, dists_f, dists_g):
            acc += w * np.abs(cdf(df, x) - cdf(dg, x))
        return acc

    def sup_abs_gap(x: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(x)
        for w, df, dg in zip(weights, dists_f, dists_g):
            if w > 0.0:
                np.maximum(acc, np.abs(cdf(df, x) - cdf(dg, x)), out=acc)
        return acc

    points = _law_breakpoints(law_f) + _law_breakpoints(law_g)
    unbounded = _right_unbounded(law_f) or _right_unbounded(law_g)
    term1 = 8.0 * math.sqrt(alpha) * _integral_with_tail(
        lambda x: np.sqrt(mean_abs_gap(x)), points, unbounded)
    term2 = alpha * _integral_with_tail(sup_abs_gap, points, unbounded)
    mu_f, _ = env_moments(law_f)
    mu_g, _ = env_moments(law_g)
    return ComparisonBound(law_f=law_f, law_g=law_g, alpha=alpha,
                           term1=term1, term2=term2, mean_gap=mu_f - mu_g)


# --- assumption checks ----------------------------------------------------------


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    value: float  # the integral/moment; inf when divergent


@dataclass(frozen=True)
class AssumptionReport:
    """Pass/fail per model assumption, with the computed quantities.

    ``min_rate`` is populated for all-exponential laws: the right-tail
    esssup condition holds for those exactly when the rates are bounded
    away from zero.
    """

    checks: tuple[ConditionCheck, ...]
    min_rate: float | None = None

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> ConditionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def check_assumptions(law: EnvironmentLaw) -> AssumptionReport:
    """Evaluate the five moment/tail conditions behind the limit theory.

    1. mean-abs-weight:       E|X| < inf (annealed first absolute moment)
    2. right-tail-mean-sqrt:  integral of (1 - E F(x))^(1/2) over x > 0
    3. right-tail-esssup:     integral of esssup (1 - F(x)) over x > 0
    4. left-tail-mean-sqrt:   integral of (E F(x))^(1/2) over x < 0
    5. left-tail-esssup:      integral of esssup F(x) over x < 0

    Every catalog law is supported on [0, oo), so both left-tail integrals
    vanish identically; they are still reported for completeness.  Failures
    are report entries, never exceptions.
    """
    improper = _has_improper(law)
    dists, weights = law.dists, law.weights

    if improper:
        mean_abs = math.inf
    else:
        mean_abs = 0.0
        for (dist, w) in law.components:
            lo, _ = support_bounds(dist)
            if lo < 0.0:
                raise TypeError("catalog laws are nonnegative")
            mean_abs += w * mean_var(dist)[0]

    def mean_right_tail(x: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(x)
        for dist, w in law.components:
            acc += w * (1.0 - cdf(dist, x))
        return np.sqrt(np.maximum(acc, 0.0))

    def sup_right_tail(x: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(x)
        for dist, w in zip(dists, weights):
            if w > 0.0:
                np.maximum(acc, 1.0 - cdf(dist, x), out=acc)
        return acc

    points = [0.0] + _law_breakpoints(law)
    unbounded = _right_unbounded(law)
    if improper:
        right_mean = math.inf
        right_sup = math.inf
    else:
        right_mean = _integral_with_tail(mean_right_tail, points, unbounded)
        right_sup = _integral_with_tail(sup_right_tail, points, unbounded)

    checks = (
        ConditionCheck("mean-abs-weight", math.isfinite(mean_abs), mean_abs),
        ConditionCheck("right-tail-mean-sqrt", math.isfinite(right_mean), right_mean),
        ConditionCheck("right-tail-esssup", math.isfinite(right_sup), right_sup),
        ConditionCheck("left-tail-mean-sqrt", True, 0.0),
        ConditionCheck("left-tail-esssup", True, 0.0),
    )
    min_rate = None
    if all(isinstance(d, Exponential) for d in dists):
        min_rate = min(d.rate for d in dists)
    return AssumptionReport(checks=checks, min_rate=min_rate)
