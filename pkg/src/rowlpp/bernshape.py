"""Analytic limit shapes for Bernoulli row environments under the strict path
geometries, plus closed-form upper bounds.

The environment is a finite list of atoms (p_i, w_i): row success probability
p_i with weight w_i.  Every expectation over p is then an exact finite sum, so
the only numerical step is a one-dimensional monotone root-find.

Conventions for degenerate atoms: any term whose numerator factor (p or 1-p)
vanishes contributes zero even when the denominator vanishes too, matching the
limit of the defining integrands; an atom at the maximal probability b makes
E[p/(b-p)] and E[p(1-p)/(b-p)^2] infinite, which simply makes the
corresponding branch unreachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .envmodel import Bernoulli, EnvironmentLaw
from .quadrature import bisect_root, expand_bracket

__all__ = [
    "BernoulliEnv",
    "ShapeEvaluation",
    "psi_strict_x",
    "psi_strict_y",
    "bernoulli_bounds",
]

BRANCH_LINEAR_EDGE = "linear-edge"
BRANCH_INTERIOR = "interior"
BRANCH_FLAT = "flat"


@dataclass(frozen=True)
class BernoulliEnv:
    """Finite-atom law of the row success probability."""

    atoms: tuple[tuple[float, float], ...]  # (p, weight)

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("need at least one atom")
        total = 0.0
        for p, w in self.atoms:
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"success probability {p} outside [0, 1]")
            if w <= 0.0:
                raise ValueError("atom weights must be positive")
            total += w
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"atom weights sum to {total}, not 1")

    @property
    def b(self) -> float:
        """Maximal success probability carrying positive weight."""
        return max(p for p, _ in self.atoms)

    @property
    def p_bar(self) -> float:
        """Mean success probability."""
        return math.fsum(w * p for p, w in self.atoms)

    def expect(self, f) -> float:
        """Finite-sum expectation of f(p); infinite terms propagate to +inf."""
        out = 0.0
        for p, w in self.atoms:
            out += w * f(p)
        return out

    @classmethod
    def from_law(cls, law: EnvironmentLaw) -> "BernoulliEnv":
        if law.mode != "iid":
            raise ValueError("analytic Bernoulli shapes assume i.i.d. rows")
        atoms = []
        for dist, w in law.components:
            if not isinstance(dist, Bernoulli):
                raise ValueError("analytic Bernoulli shapes need Bernoulli rows")
            atoms.append((dist.p, w))
        return cls(atoms=tuple(atoms))


@dataclass(frozen=True)
class ShapeEvaluation:
    """A limit-shape value together with the active formula branch."""

    value: float
    branch: str
    root_z0: float | None = None


def _ratio_or_inf(num: float, den: float) -> float:
    # numerator-zero wins over denominator-zero (integrand limits)
    if num == 0.0:
        return 0.0
    if den <= 0.0:
        return math.inf
    return num / den


def psi_strict_x(env: BernoulliEnv, x: float, y: float) -> ShapeEvaluation:
    """Limit shape for paths strict in x (one cell per column).

    With r = x/y and thresholds E1 = E[p/(1-p)], E2 = E[p(1-p)/(b-p)^2]:
    r <= E1 gives value x (one success per column is the ceiling and is
    achievable); r >= E2 gives b x + y (1-b) E[p/(b-p)]; in between, z0 in
    (b, 1) solves r = E[p(1-p)/(z0-p)^2] and the value is
    y z0^2 E[(1-p)/(z0-p)^2] - y.  For a finite atom list E2 is infinite
    whenever 0 < b < 1 (the maximum is itself an atom), so that branch only
    activates in the degenerate all-zero case; an atom at p = 1 makes E1
    infinite and the value is x for every direction.
    """
    if x <= 0.0 or y <= 0.0:
        raise ValueError("x and y must be positive")
    r = x / y
    b = env.b
    e1 = env.expect(lambda p: _ratio_or_inf(p, 1.0 - p))
    if r <= e1:
        return ShapeEvaluation(value=x, branch=BRANCH_LINEAR_EDGE)
    e2 = env.expect(lambda p: _ratio_or_inf(p * (1.0 - p), (b - p) ** 2))
    if r >= e2:
        value = b * x + y * (1.0 - b) * env.expect(lambda p: _ratio_or_inf(p, b - p))
        return ShapeEvaluation(value=value, branch=BRANCH_FLAT)

    def gap_map(z: float) -> float:
        return env.expect(lambda p: _ratio_or_inf(p * (1.0 - p), (z - p) ** 2))

    lo = b + 1e-13  # the map blows up at the atom at b; start just above
    hi = 1.0
    z0 = bisect_root(lambda z: gap_map(z) - r, lo, hi, rel_tol=4e-16, abs_tol=1e-15)
    value = y * z0 * z0 * env.expect(
        lambda p: _ratio_or_inf(1.0 - p, (z0 - p) ** 2)
    ) - y
    return ShapeEvaluation(value=value, branch=BRANCH_INTERIOR, root_z0=z0)


def psi_strict_y(env: BernoulliEnv, x: float, y: float) -> ShapeEvaluation:
    """Limit shape for paths strict in y (one cell per row).

    With r = x/y: if r >= E[1_{p>0} (1-p)/p] the path can realize a success in
    every row that admits one, giving the flat value y * P(p > 0); otherwise
    z0 > 0 solves r = E[p(1-p)/(z0+p)^2] and the value is
    y - y z0^2 E[(1-p)/(z0+p)^2].  Restricting the threshold expectation to
    p > 0 is the continuous extension when mass sits at p = 0: those rows
    contribute nothing to either side of the defining equation, and the
    interior value tends to y * P(p > 0) as z0 -> 0.
    """
    if x <= 0.0 or y <= 0.0:
        raise ValueError("x and y must be positive")
    r = x / y
    mass_pos = math.fsum(w for p, w in env.atoms if p > 0.0)
    threshold = env.expect(lambda p: _ratio_or_inf((1.0 - p) if p > 0.0 else 0.0, p))
    if r >= threshold:
        return ShapeEvaluation(value=y * mass_pos, branch=BRANCH_FLAT)

    def gap_map(z: float) -> float:
        return env.expect(lambda p: _ratio_or_inf(p * (1.0 - p), (z + p) ** 2))

    lo = 0.0
    hi = expand_bracket(lambda z: gap_map(z) - r, lo, 1.0)[1]
    z0 = bisect_root(lambda z: gap_map(z) - r, lo, hi, rel_tol=4e-16, abs_tol=1e-15)
    value = y - y * z0 * z0 * env.expect(
        lambda p: _ratio_or_inf(1.0 - p, (z0 + p) ** 2)
    )
    return ShapeEvaluation(value=value, branch=BRANCH_INTERIOR, root_z0=z0)


def bernoulli_bounds(env: BernoulliEnv, x: float, y: float) -> tuple[float, float, float, float]:
    """Closed-form upper bounds (strict-x, strict-y, weak-weak, loose).

    The first two dominate the corresponding limit shapes; the third bounds
    the symmetric geometry and is itself dominated by the fourth.
    """
    if x <= 0.0 or y <= 0.0:
        raise ValueError("x and y must be positive")
    b = env.b
    pb = env.p_bar
    sxy = math.sqrt(x * y)
    bound_sx = b * x + 2.0 * math.sqrt(pb * (1.0 - b) * x * y)
    bound_sy = pb * y + 2.0 * math.sqrt(pb * (1.0 - pb) * x * y)
    bound_ww = pb * y + 4.0 * math.sqrt(pb * (1.0 - pb) * x * y) + b * x
    bound_loose = (y + 4.0 * sxy) * math.sqrt(pb) + b * x
    return bound_sx, bound_sy, bound_ww, bound_loose
