"""Exact limit shape for exponential-row environments via concave duality.

A row with rate xi serves at exponential rate xi; the rate itself is drawn
from a measure m on [c, oo), c = ess-inf.  The machinery:

* ``u_star``      critical density u* = integral c/(xi-c) dm (may be +inf)
* ``a_of_u``      the strictly increasing concave inverse of
                  u(a) = integral a/(xi-a) dm on (0, c)
* ``g_of_y``      g(y) = sup_u { a(u) - y u }, evaluated by regime
* ``psi_g``       Psi(x,y) = inf { t : t g(y/t) >= x }
* ``boundary_psi``  Psi(1, alpha) near the x-axis, exact in both regimes
* ``asymptotic_constants`` / ``asymptotic_psi``
                  small-alpha expansions driven by the tail exponent nu

Every implicit equation here is solved by bracketed bisection on a map that
is strictly monotone in closed form, so the brackets are rigorous.

The key reduction used by ``psi_g``: at the duality optimum the crossing t
and the optimal rate parameter a are linked by

    x = y * a^2 * I2(a),      t = y * D(a),

with I2(a) = integral (xi-a)^-2 dm and D(a) = integral xi/(xi-a)^2 dm
(both strictly increasing in a).  Eliminating t turns the two nested
root-finds of the naive level-curve inversion into a single bisection in a,
which is what keeps dense (x, y) grids cheap.  When x/y >= c^2 I2(c) the
optimum pins at a = c and t = (x + y u*)/c exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .envmodel import RateMeasure, measure_expectation
from .quadrature import bisect_root

__all__ = [
    "DualState",
    "BoundaryResult",
    "BoundaryWindowError",
    "AsymptoticConstants",
    "u_star",
    "a_of_u",
    "g_of_y",
    "psi_g",
    "boundary_psi",
    "asymptotic_constants",
    "asymptotic_psi",
]


def u_star(m: RateMeasure) -> float:
    """Critical density: integral of c/(xi - c); +inf when mass piles on c."""
    return measure_expectation(m, "c/(xi-c)")


def _density_of_a(m: RateMeasure, a: float) -> float:
    return measure_expectation(m, "a/(xi-a)", a)


def _d_of_a(m: RateMeasure, a: float) -> float:
    # Reciprocal slope of the concave envelope: D(a(u)) = 1/a'(u).
    return measure_expectation(m, "xi/(xi-a)^2", a)


def a_of_u(m: RateMeasure, u: float, *, ustar: float | None = None) -> float:
    """Invert u = integral a/(xi-a) dm for a in (0, c); a = c beyond u*."""
    if u < 0.0:
        raise ValueError("u must be nonnegative")
    if u == 0.0:
        return 0.0
    if ustar is None:
        ustar = u_star(m)
    if u >= ustar:
        return m.c
    return bisect_root(lambda a: _density_of_a(m, a) - u, 0.0, m.c, rel_tol=1e-13)


def g_of_y(m: RateMeasure, y: float) -> float:
    """Concave-dual level function g(y) = sup_u { a(u) - y u }.

    Three regimes, split on the envelope slope a'(u) = 1/D(a(u)): the slope
    at u = 0 is 1/D(0), so g vanishes once y >= that; when u* is finite the
    slope bottoms out at 1/D(c-) and g continues linearly as c - y u*;
    otherwise the sup sits where D(a) = 1/y, one bisection away.
    """
    if y < 0.0:
        raise ValueError("y must be nonnegative")
    c = m.c
    if y == 0.0:
        return c
    d0 = _d_of_a(m, 0.0)
    if y * d0 >= 1.0:
        return 0.0
    ustar = u_star(m)
    if math.isfinite(ustar) and y * _d_of_a(m, c) <= 1.0:
        return c - y * ustar
    a = bisect_root(lambda a: y * _d_of_a(m, a) - 1.0, 0.0, c, rel_tol=1e-13)
    return a - y * _density_of_a(m, a)


def psi_g(m: RateMeasure, x: float, y: float) -> float:
    """Time constant Psi(x, y) = inf { t : t g(y/t) >= x }.

    Solved through the optimum-rate reduction described in the module
    docstring: one bisection on the strictly increasing a |-> a^2 I2(a),
    with the pinned closed form (x + y u*)/c once x/y >= c^2 I2(c).
    """
    if x <= 0.0 or y <= 0.0:
        raise ValueError("x and y must be positive")
    c = m.c
    r = x / y
    i2c = measure_expectation(m, "1/(xi-a)^2", c)
    if math.isfinite(i2c) and r >= c * c * i2c:
        return (x + y * u_star(m)) / c

    def crossing(a: float) -> float:
        return a * a * measure_expectation(m, "1/(xi-a)^2", a) - r

    a0 = bisect_root(crossing, 0.0, c, rel_tol=1e-13)
    return y * _d_of_a(m, a0)


@dataclass
class DualState:
    """Memoizing evaluation context for one rate measure.

    Bisections are deterministic, so concurrent use returns the same values
    as sequential use; the memo is a plain dict (atomic under the GIL,
    last-write-wins with identical values).
    """

    measure: RateMeasure

    def __post_init__(self):
        self.u_star = u_star(self.measure)
        self._a_memo: dict[float, float] = {}

    def a(self, u: float) -> float:
        got = self._a_memo.get(u)
        if got is None:
            got = a_of_u(self.measure, u, ustar=self.u_star)
            self._a_memo[u] = got
        return got

    def g(self, y: float) -> float:
        return g_of_y(self.measure, y)

    def psi(self, x: float, y: float) -> float:
        return psi_g(self.measure, x, y)


class BoundaryWindowError(ValueError):
    """Requested alpha lies beyond the exact linear-in-alpha window."""

    def __init__(self, alpha: float, alpha_max: float):
        super().__init__(
            f"alpha={alpha} exceeds the pinned-branch window alpha_max={alpha_max}; "
            "evaluate the shape function directly instead"
        )
        self.alpha = alpha
        self.alpha_max = alpha_max


@dataclass(frozen=True)
class BoundaryResult:
    """Psi(1, alpha) near the x-axis with the branch that produced it."""

    alpha: float
    psi: float
    case: str  # "pinned" (optimal rate at c) or "interior" (solved root)
    a0: float | None = None
    u0: float | None = None


def boundary_psi(m: RateMeasure, alpha: float) -> BoundaryResult:
    """Exact Psi(1, alpha) for small alpha.

    When integral (xi-c)^-2 dm is finite the optimal rate parameter stays
    pinned at c for alpha <= alpha_max = 1/(c^2 I2(c)) and
    Psi = 1/c + alpha * integral (xi-c)^-1 dm exactly; beyond the window a
    ``BoundaryWindowError`` carries alpha_max.  When that integral diverges
    the optimum is interior for every alpha: a0 in (0, c) solves
    1/a0^2 = alpha * integral (xi-a0)^-2 dm and
    Psi = 1/a0 + alpha * integral (xi-a0)^-1 dm.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    c = m.c
    i2c = measure_expectation(m, "1/(xi-a)^2", c)
    if math.isfinite(i2c):
        alpha_max = 1.0 / (c * c * i2c)
        if alpha > alpha_max:
            raise BoundaryWindowError(alpha, alpha_max)
        ustar = u_star(m)
        psi = 1.0 / c + alpha * measure_expectation(m, "1/(xi-a)", c)
        return BoundaryResult(alpha=alpha, psi=psi, case="pinned", a0=c, u0=ustar)

    def balance(a: float) -> float:
        return 1.0 / (a * a) - alpha * measure_expectation(m, "1/(xi-a)^2", a)

    lo = 0.5 * c
    while balance(lo) <= 0.0:
        lo *= 0.5
    a0 = bisect_root(balance, lo, c, rel_tol=1e-14)
    psi = 1.0 / a0 + alpha * measure_expectation(m, "1/(xi-a)", a0)
    u0 = _density_of_a(m, a0)
    return BoundaryResult(alpha=alpha, psi=psi, case="interior", a0=a0, u0=u0)


@dataclass(frozen=True)
class AsymptoticConstants:
    """Constants of the small-alpha expansion for a tail exponent nu."""

    nu: float
    kappa: float
    c: float
    a_nu: float
    a_nu2: float | None  # Beta(-nu, nu+2); defined for nu < 0
    b0: float | None  # (2 kappa c^2 A_nu)^(1/(1-nu)); undefined at nu = 1
    b: float | None  # B0/c^2 + kappa B0^nu A_nu2; defined for nu < 0


def _a_nu_series(nu: float) -> float:
    """Sum A_nu = sum_k binom(nu+1, k) (-1)^k / (k - nu + 1).

    Terms are generated by the ratio recurrence
    s_{k+1} = s_k (k - nu - 1)/(k + 1) on s_k = binom(nu+1, k)(-1)^k and
    summed in blocks until |term| < 1e-15.  Near nu = -1 the terms decay
    like k^(-2) and the cutoff alone would strand ~1e-8 of mass in the
    tail, so the remainder is added back as a power-law tail estimate
    (exponent fitted from the last two terms, Euler-Maclaurin corrected);
    its relative error is O(1/K), far below the discarded mass itself.
    """
    if nu == 1.0:
        return math.inf  # k = 0 term is 1/(1 - nu)
    total = 0.0
    s = 1.0
    k0 = 0
    block = 65536
    t_prev = t_last = 0.0
    while True:
        ks = np.arange(k0, k0 + block, dtype=np.float64)
        factors = (ks - nu - 1.0) / (ks + 1.0)
        cum = np.cumprod(factors)
        svec = np.empty(block)
        svec[0] = s
        svec[1:] = s * cum[:-1]
        terms = svec / (ks - nu + 1.0)
        total += float(np.sum(terms))
        s *= float(cum[-1])
        t_prev, t_last = float(terms[-2]), float(terms[-1])
        k0 += block
        if abs(t_last) < 1e-15 or s == 0.0:
            break
        if k0 > 200_000_000:
            raise RuntimeError("series for A_nu failed to converge")
    if t_last != 0.0 and t_prev != 0.0 and t_prev / t_last > 1.0:
        k_last = k0 - 1
        p = math.log(t_prev / t_last) / math.log(k_last / (k_last - 1.0))
        if p > 1.5:
            a = k_last + 1.0
            zeta_tail = a ** (1.0 - p) / (p - 1.0) + 0.5 * a**-p + p / 12.0 * a ** (-p - 1.0)
            total += t_last * k_last**p * zeta_tail
    return total


def asymptotic_constants(nu: float, kappa: float, c: float) -> AsymptoticConstants:
    """Constants for the small-alpha expansion; see ``asymptotic_psi``.

    A_nu comes from the alternating binomial series (equivalently the Beta
    integral Gamma(1-nu) Gamma(2+nu) / 2); A_nu2 = Gamma(-nu) Gamma(nu+2)
    exists only for nu < 0, which is the only regime that uses it.
    """
    if not (-1.0 <= nu <= 1.0):
        raise ValueError("nu must lie in [-1, 1]")
    if kappa <= 0.0 or c <= 0.0:
        raise ValueError("kappa and c must be positive")
    a_nu = _a_nu_series(nu)
    a_nu2 = math.gamma(-nu) * math.gamma(nu + 2.0) if nu < 0.0 else None
    if nu == 1.0:
        return AsymptoticConstants(nu=nu, kappa=kappa, c=c, a_nu=a_nu,
                                   a_nu2=a_nu2, b0=None, b=None)
    b0 = (2.0 * kappa * c * c * a_nu) ** (1.0 / (1.0 - nu))
    b = b0 / (c * c) + kappa * b0**nu * a_nu2 if nu < 0.0 else None
    return AsymptoticConstants(nu=nu, kappa=kappa, c=c, a_nu=a_nu,
                               a_nu2=a_nu2, b0=b0, b=b)


def asymptotic_psi(m: RateMeasure, alpha: float) -> float:
    """Leading-plus-correction expansion of Psi(1, alpha) as alpha -> 0.

    The tail exponent nu of the measure picks the regime: nu in (0, 1]
    gives the exact linear form 1/c + alpha * integral (xi-c)^-1 dm;
    nu = 0 gives 1/c - kappa alpha log alpha; nu in [-1, 0) gives
    1/c + B alpha^(1/(1-nu)).  At nu = -1 (an atom at c) the correction is
    2 sqrt(kappa) / c * sqrt(alpha), the generic square-root boundary law.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    if m.tail is None:
        raise ValueError("measure has no tail segment near c")
    kappa, nu, _width = m.tail
    c = m.c
    if nu > 0.0:
        return 1.0 / c + alpha * measure_expectation(m, "1/(xi-a)", c)
    if nu == 0.0:
        return 1.0 / c - kappa * alpha * math.log(alpha)
    b = asymptotic_constants(nu, kappa, c).b
    return 1.0 / c + b * alpha ** (1.0 / (1.0 - nu))
