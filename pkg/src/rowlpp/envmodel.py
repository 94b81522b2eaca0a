"""Weight distributions, environment laws, and rate measures.

A lattice environment is built in two layers: first a random sequence of row
distributions (one law per lattice row), then i.i.d. weights within each row
drawn from that row's law.  This module owns the first layer plus all exact
moment calculations, the generalized-inverse quantile used for coupling, and
singularity-aware expectations against the rate measure that drives the
exponential model.

All sampling is routed through ``quantile`` applied to shared uniforms, so two
laws with identical component weights sampled from the same seed are coupled
componentwise — the comparison machinery in :mod:`rowlpp.boundary` relies on
this.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .quadrature import adaptive_gauss_legendre

__all__ = [
    "Exponential",
    "Bernoulli",
    "FiniteDiscrete",
    "TruncatedThreePart",
    "RowDistribution",
    "EnvironmentLaw",
    "EnvRealization",
    "RateMeasure",
    "quantile",
    "mean_var",
    "env_moments",
    "sample_environment",
    "measure_expectation",
    "truncate_two_moment",
    "law_from_dict",
    "law_to_dict",
    "measure_from_dict",
    "measure_to_dict",
    "exp_law_from_measure",
]

_PROB_TOL = 1e-12


# --- row distributions -------------------------------------------------------


@dataclass(frozen=True)
class Exponential:
    """Exponential weight law with rate ``rate`` (mean 1/rate).

    ``rate == 0`` constructs an *improper* placeholder that cannot be sampled
    or integrated; it exists so assumption checking has something to fail on.
    """

    rate: float
    kind = "exponential"

    def __post_init__(self) -> None:
        if not (self.rate >= 0.0) or not math.isfinite(self.rate):
            raise ValueError(f"exponential rate must be finite and >= 0, got {self.rate}")

    @property
    def improper(self) -> bool:
        return self.rate == 0.0

    def _require_proper(self) -> None:
        if self.improper:
            raise ValueError("improper Exponential(rate=0): no moments or samples exist")


@dataclass(frozen=True)
class Bernoulli:
    """Bernoulli weight law: weight 1 with probability ``p``, else 0."""

    p: float
    kind = "bernoulli"

    def __post_init__(self) -> None:
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"bernoulli p must lie in [0, 1], got {self.p}")


@dataclass(frozen=True)
class FiniteDiscrete:
    """Finitely supported weight law given by (value, probability) atoms.

    Atoms are sorted by value on construction; probabilities must sum to one
    within 1e-12.  Zero-probability atoms are allowed (they are skipped by the
    quantile, which resolves ties upward).
    """

    atoms: tuple[tuple[float, float], ...]
    kind = "finite_discrete"

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("finite discrete law needs at least one atom")
        srt = tuple(sorted((float(v), float(p)) for v, p in self.atoms))
        object.__setattr__(self, "atoms", srt)
        probs = [p for _, p in srt]
        if min(probs) < 0.0:
            raise ValueError("atom probabilities must be nonnegative")
        if abs(sum(probs) - 1.0) > _PROB_TOL:
            raise ValueError(f"atom probabilities sum to {sum(probs)}, not 1")

    @property
    def values(self) -> np.ndarray:
        return np.array([v for v, _ in self.atoms])

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms])


@dataclass(frozen=True)
class TruncatedThreePart:
    """Exponential law truncated at ``threshold`` with two compensating atoms.

    Agrees with Exponential(rate) below the threshold, then places the
    leftover mass e^{-rate*threshold} on the two points {threshold, upper}
    split as (1 - ptilde, ptilde), chosen so the first two moments of the
    base exponential are preserved exactly.  Construct via
    :func:`truncate_two_moment`.
    """

    rate: float
    threshold: float
    ptilde: float
    upper: float
    kind = "truncated_three_part"

    def __post_init__(self) -> None:
        if self.rate <= 0.0:
            raise ValueError("rate must be positive")
        if self.threshold <= 0.0:
            raise ValueError("threshold must be positive")
        if not (0.0 <= self.ptilde <= 1.0):
            raise ValueError("ptilde must lie in [0, 1]")
        if self.upper < self.threshold:
            raise ValueError("upper atom must sit at or above the threshold")


RowDistribution = Union[Exponential, Bernoulli, FiniteDiscrete, TruncatedThreePart]

_KIND_MAP = {
    "exponential": Exponential,
    "bernoulli": Bernoulli,
    "finite_discrete": FiniteDiscrete,
    "truncated_three_part": TruncatedThreePart,
}


def truncate_two_moment(dist: Exponential, tau: float) -> TruncatedThreePart:
    """Truncate an exponential law at ``tau`` preserving mean and variance.

    The mass beyond tau (e^{-rate*tau}) is split between an atom at tau and an
    atom at u = tau + 2/rate.  Matching E[Y | Y > tau] = tau + 1/rate and
    E[Y^2 | Y > tau] = tau^2 + 2*tau/rate + 2/rate^2 forces the split
    probability ptilde = 1/2 and the location u = tau + 2/rate; both first and
    second moments of the base law are then preserved exactly, and the support
    is bounded by tau + 2/rate.
    """
    dist._require_proper()
    if tau <= 0.0:
        raise ValueError("truncation threshold must be positive")
    xi = dist.rate
    # solving (1-pt)*tau + pt*u = E[Y|Y>tau] = tau + 1/xi and
    # (1-pt)*tau^2 + pt*u^2 = E[Y^2|Y>tau] = tau^2 + 2tau/xi + 2/xi^2
    # gives u = (E[Y^2|Y>tau] - tau^2)/(E[Y|Y>tau] - tau) - tau, which
    # simplifies exactly to tau + 2/xi (and then pt = 1/2)
    upper = tau + 2.0 / xi
    m1 = tau + 1.0 / xi  # E[Y | Y > tau]
    ptilde = (m1 - tau) / (upper - tau)
    return TruncatedThreePart(rate=xi, threshold=tau, ptilde=ptilde, upper=upper)


# --- quantile (generalized inverse) and exact moments -------------------------


def quantile(dist: RowDistribution, u):
    """Generalized inverse F^{-1}(u) = sup{x : F(x) < u} for u in (0, 1).

    Accepts a scalar or a numpy array of probabilities; ties at atom
    boundaries resolve upward and zero-probability atoms are skipped, matching
    the sup-convention exactly.  Nondecreasing in u, and antitone in the law:
    if F >= G pointwise then F^{-1}(u) <= G^{-1}(u).
    """
    arr = np.asarray(u, dtype=float)
    scalar = arr.ndim == 0
    if arr.size and (arr.min() <= 0.0 or arr.max() >= 1.0):
        raise ValueError("quantile levels must lie strictly inside (0, 1)")
    if isinstance(dist, Exponential):
        dist._require_proper()
        out = -np.log1p(-arr) / dist.rate
    elif isinstance(dist, Bernoulli):
        out = (arr > 1.0 - dist.p).astype(float)
    elif isinstance(dist, FiniteDiscrete):
        cum = np.cumsum(self_probs := dist.probs)
        cum[-1] = 1.0  # guard against rounding just below 1
        idx = np.searchsorted(cum, arr, side="left")
        out = dist.values[np.minimum(idx, len(self_probs) - 1)]
    elif isinstance(dist, TruncatedThreePart):
        xi, tau = dist.rate, dist.threshold
        cut_exp = -math.expm1(-xi * tau)  # mass of the continuous part
        cut_mid = 1.0 - dist.ptilde * math.exp(-xi * tau)  # below the top atom
        out = np.where(
            arr < cut_exp,
            -np.log1p(-np.minimum(arr, cut_exp * (1 - 1e-16))) / xi,
            np.where(arr <= cut_mid, tau, dist.upper),
        )
    else:
        raise TypeError(f"unknown distribution {dist!r}")
    return float(out) if scalar else out


def cdf(dist: RowDistribution, x):
    """Right-continuous distribution function F(x); scalar or array x.

    The improper Exponential(rate=0) returns 0 everywhere (all mass escaped
    to infinity), which is exactly what the assumption checks need to fail
    on; every proper law evaluates in closed form.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    if isinstance(dist, Exponential):
        if dist.improper:
            out = np.zeros_like(arr)
        else:
            out = np.where(arr < 0.0, 0.0, -np.expm1(-dist.rate * np.maximum(arr, 0.0)))
    elif isinstance(dist, Bernoulli):
        out = np.where(arr < 0.0, 0.0, np.where(arr < 1.0, 1.0 - dist.p, 1.0))
    elif isinstance(dist, FiniteDiscrete):
        cum = np.cumsum(dist.probs)
        cum[-1] = 1.0
        idx = np.searchsorted(dist.values, arr, side="right")
        out = np.where(idx > 0, cum[np.maximum(idx, 1) - 1], 0.0)
    elif isinstance(dist, TruncatedThreePart):
        xi, tau = dist.rate, dist.threshold
        body = -np.expm1(-xi * np.maximum(arr, 0.0))
        mid = 1.0 - dist.ptilde * math.exp(-xi * tau)
        out = np.where(
            arr < 0.0,
            0.0,
            np.where(arr < tau, body, np.where(arr < dist.upper, mid, 1.0)),
        )
    else:
        raise TypeError(f"unknown distribution {dist!r}")
    return float(out) if scalar else out


def cdf_breakpoints(dist: RowDistribution) -> tuple[float, ...]:
    """Points where F has a jump or a kink (for piecewise quadrature)."""
    if isinstance(dist, Exponential):
        return (0.0,)
    if isinstance(dist, Bernoulli):
        return (0.0, 1.0)
    if isinstance(dist, FiniteDiscrete):
        return tuple(v for v, p in dist.atoms if p > 0.0)
    if isinstance(dist, TruncatedThreePart):
        return (0.0, dist.threshold, dist.upper)
    raise TypeError(f"unknown distribution {dist!r}")


def mean_var(dist: RowDistribution) -> tuple[float, float]:
    """Exact (mean, variance) of a row distribution, in closed form."""
    if isinstance(dist, Exponential):
        dist._require_proper()
        m = 1.0 / dist.rate
        return m, m * m
    if isinstance(dist, Bernoulli):
        return dist.p, dist.p * (1.0 - dist.p)
    if isinstance(dist, FiniteDiscrete):
        v, p = dist.values, dist.probs
        mean = float(p @ v)
        var = float(p @ (v - mean) ** 2)
        return mean, max(var, 0.0)
    if isinstance(dist, TruncatedThreePart):
        # moments of the constructed law itself (continuous piece + two atoms),
        # so moment preservation is a real check of the algebra rather than a
        # restatement of the base law's moments
        xi, tau = dist.rate, dist.threshold
        e = math.exp(-xi * tau)
        m1_body = 1.0 / xi - e * (tau + 1.0 / xi)
        m2_body = 2.0 / xi**2 - e * (tau * tau + 2.0 * tau / xi + 2.0 / xi**2)
        w_mid = (1.0 - dist.ptilde) * e
        w_top = dist.ptilde * e
        mean = m1_body + w_mid * tau + w_top * dist.upper
        second = m2_body + w_mid * tau * tau + w_top * dist.upper**2
        return mean, max(second - mean * mean, 0.0)
    raise TypeError(f"unknown distribution {dist!r}")


def support_bounds(dist: RowDistribution) -> tuple[float, float]:
    """Closed support interval [lo, hi] (hi may be +inf)."""
    if isinstance(dist, Exponential):
        return 0.0, math.inf
    if isinstance(dist, Bernoulli):
        return 0.0, 1.0
    if isinstance(dist, FiniteDiscrete):
        live = [v for v, p in dist.atoms if p > 0.0]
        return min(live), max(live)
    if isinstance(dist, TruncatedThreePart):
        return 0.0, dist.upper
    raise TypeError(f"unknown distribution {dist!r}")


# --- environment laws ----------------------------------------------------------


@dataclass(frozen=True)
class EnvironmentLaw:
    """Law of the row-distribution sequence: a finite mixture of row laws.

    ``mode`` is "iid" (each row's law drawn independently from the component
    weights) or "finite_state" (a stationary Markov chain on the components,
    whose transition matrix must be row-stochastic with the component weights
    as a stationary vector).  The i.i.d. case coincides with the transition
    matrix having identical rows.
    """

    components: tuple[tuple[RowDistribution, float], ...]
    mode: str = "iid"
    transition: tuple[tuple[float, ...], ...] | None = None

    def __post_init__(self) -> None:
        if not self.components:
            raise ValueError("environment law needs at least one component")
        comps = tuple((d, float(w)) for d, w in self.components)
        object.__setattr__(self, "components", comps)
        w = np.array([wt for _, wt in comps])
        if w.min() < 0.0:
            raise ValueError("component weights must be nonnegative")
        if abs(w.sum() - 1.0) > _PROB_TOL:
            raise ValueError(f"component weights sum to {w.sum()}, not 1")
        if self.mode not in ("iid", "finite_state"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "finite_state":
            if self.transition is None:
                raise ValueError("finite_state mode requires a transition matrix")
            P = np.array(self.transition, dtype=float)
            k = len(comps)
            if P.shape != (k, k):
                raise ValueError(f"transition matrix must be {k}x{k}")
            if P.min() < 0.0 or np.abs(P.sum(axis=1) - 1.0).max() > _PROB_TOL:
                raise ValueError("transition matrix must be row-stochastic")
            if np.abs(w @ P - w).max() > 1e-10:
                raise ValueError("component weights are not stationary for the transition matrix")
            object.__setattr__(
                self, "transition", tuple(tuple(float(x) for x in row) for row in P)
            )

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.components])

    @property
    def dists(self) -> tuple[RowDistribution, ...]:
        return tuple(d for d, _ in self.components)


@dataclass(frozen=True)
class EnvRealization:
    """One sampled environment: a row distribution per lattice row."""

    row_dists: tuple[RowDistribution, ...]
    indices: tuple[int, ...]  # component index per row, for grouped sampling
    seed: int

    def __len__(self) -> int:
        return len(self.row_dists)


def env_moments(law: EnvironmentLaw) -> tuple[float, float]:
    """(mu, sigma^2) of the law: mean of row means, mean of row *variances*.

    Note sigma^2 averages the quenched variances — it is not the variance of
    the mixture distribution.
    """
    mu = 0.0
    var = 0.0
    for dist, w in law.components:
        m, v = mean_var(dist)
        mu += w * m
        var += w * v
    return mu, var


def sample_environment(law: EnvironmentLaw, n_rows: int, seed: int) -> EnvRealization:
    """Draw the row-distribution sequence; deterministic given the seed."""
    if n_rows < 1:
        raise ValueError("n_rows must be >= 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    w = law.weights
    k = len(law.components)
    if law.mode == "iid":
        if k == 1:
            idx = np.zeros(n_rows, dtype=np.int64)
        else:
            cum = np.cumsum(w)
            cum[-1] = 1.0
            idx = np.searchsorted(cum, rng.random(n_rows), side="right")
    else:
        P_cum = np.cumsum(np.array(law.transition, dtype=float), axis=1)
        P_cum[:, -1] = 1.0
        u = rng.random(n_rows)
        cum0 = np.cumsum(w)
        cum0[-1] = 1.0
        idx = np.empty(n_rows, dtype=np.int64)
        state = int(np.searchsorted(cum0, u[0], side="right"))
        idx[0] = state
        for t in range(1, n_rows):
            state = int(np.searchsorted(P_cum[state], u[t], side="right"))
            idx[t] = state
    dists = law.dists
    return EnvRealization(
        row_dists=tuple(dists[i] for i in idx),
        indices=tuple(int(i) for i in idx),
        seed=seed,
    )


# --- rate measure and its expectations -----------------------------------------


@dataclass(frozen=True)
class RateMeasure:
    """Probability measure m on [c, oo) for the exponential-row model.

    Finitely many atoms (xi_i >= c, weight w_i > 0) plus an optional tail
    segment: density kappa*(nu+1)*(xi-c)^nu on (c, c+width], total tail mass
    kappa*width^(nu+1).  nu = -1 is read as an atom of mass kappa at c.  The
    total mass must be 1, and some mass must sit in every right neighborhood
    of c (c is the exact lower bound of the support).
    """

    c: float
    atoms: tuple[tuple[float, float], ...] = ()
    tail: tuple[float, float, float] | None = None  # (kappa, nu, width)

    def __post_init__(self) -> None:
        if not (self.c > 0.0) or not math.isfinite(self.c):
            raise ValueError("c must be positive and finite")
        atoms = tuple(sorted((float(x), float(w)) for x, w in self.atoms))
        object.__setattr__(self, "atoms", atoms)
        for x, w in atoms:
            if x < self.c:
                raise ValueError(f"atom at {x} lies below c={self.c}")
            if w <= 0.0:
                raise ValueError("atom weights must be positive")
        if self.tail is not None:
            kappa, nu, width = (float(v) for v in self.tail)
            object.__setattr__(self, "tail", (kappa, nu, width))
            if kappa <= 0.0:
                raise ValueError("tail kappa must be positive")
            if nu < -1.0:
                raise ValueError("tail exponent nu must be >= -1")
            if width <= 0.0:
                raise ValueError("tail width must be positive")
        total = sum(w for _, w in atoms) + self.tail_mass()
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"total mass is {total}, not 1")
        if not self.has_mass_at_c():
            raise ValueError("m[c, c+eps) must be positive: add a tail or an atom at c")

    def tail_mass(self) -> float:
        if self.tail is None:
            return 0.0
        kappa, nu, width = self.tail
        return kappa if nu == -1.0 else kappa * width ** (nu + 1.0)

    def has_mass_at_c(self) -> bool:
        if self.tail is not None:
            return True
        return any(x == self.c for x, _ in self.atoms)

    def parts(self) -> tuple[tuple[tuple[float, float], ...], tuple[float, float, float] | None]:
        """Atoms (with a nu=-1 tail folded in as an atom at c) and the true tail."""
        atoms = self.atoms
        tail = self.tail
        if tail is not None and tail[1] == -1.0:
            atoms = tuple(sorted(atoms + ((self.c, tail[0]),)))
            tail = None
        return atoms, tail

    def mass_below(self, xi: float) -> float:
        """m[c, xi) — used for the numeric tail-limit check."""
        atoms, tail = self.parts()
        total = sum(w for x, w in atoms if x < xi)
        if tail is not None and xi > self.c:
            kappa, nu, width = tail
            s = min(xi - self.c, width)
            total += kappa * s ** (nu + 1.0)
        return total


# Integrand catalog.  Each entry maps (xi, a, c) -> value, vectorized over xi,
# together with the order of its singularity at xi = a (0 means none).
def _h_a_over(xi, a, c):
    return a / (xi - a)


def _h_inv(xi, a, c):
    return 1.0 / (xi - a)


def _h_inv_sq(xi, a, c):
    return 1.0 / (xi - a) ** 2


def _h_xi_over_sq(xi, a, c):
    return xi / (xi - a) ** 2


def _h_inv_xi(xi, a, c):
    return 1.0 / xi


def _h_inv_xi_sq(xi, a, c):
    return 1.0 / xi**2


def _h_c_over(xi, a, c):
    return c / (xi - c)


_CATALOG = {
    "a/(xi-a)": (_h_a_over, 1),
    "1/(xi-a)": (_h_inv, 1),
    "1/(xi-a)^2": (_h_inv_sq, 2),
    "xi/(xi-a)^2": (_h_xi_over_sq, 2),
    "1/xi": (_h_inv_xi, 0),
    "1/xi^2": (_h_inv_xi_sq, 0),
    "c/(xi-c)": (_h_c_over, 1),
}


def _tail_integral(h, a: float, c: float, kappa: float, nu: float, width: float,
                   rel_tol: float = 1e-12) -> float:
    """integral of h(xi) * kappa*(nu+1)*(xi-c)^nu d(xi) over (c, c+width].

    h must be smooth on (c, c+width] (any xi=a singularity with a < c stays
    outside).  For nu < 0 the substitution sigma = s^(nu+1) (s = xi - c)
    removes the endpoint singularity: the integral becomes
    kappa * integral of h(c + sigma^(1/(nu+1))) d(sigma) over (0, width^(nu+1)],
    whose integrand is smooth at 0.  For nu >= 0 the direct form is already
    integrable and adaptive refinement handles the (mild) endpoint behavior.
    """
    if nu < 0.0:
        q = 1.0 / (nu + 1.0)

        def transformed(sig):
            return h(c + sig**q, a, c)

        return kappa * adaptive_gauss_legendre(
            transformed, 0.0, width ** (nu + 1.0), rel_tol=rel_tol
        )

    def direct(s):
        return h(c + s, a, c) * (kappa * (nu + 1.0) * s**nu)

    return adaptive_gauss_legendre(direct, 0.0, width, rel_tol=rel_tol)


def measure_expectation(m: RateMeasure, kind: str, a: float = 0.0) -> float:
    """integral of the catalog integrand against the rate measure.

    ``kind`` is one of ``{"a/(xi-a)", "1/(xi-a)", "1/(xi-a)^2", "xi/(xi-a)^2",
    "1/xi", "1/xi^2", "c/(xi-c)"}``.  Atoms are summed exactly; the tail
    segment is integrated by adaptive Gauss-Legendre after substituting away
    the endpoint singularity.  Integrands singular at xi = a require a <= c;
    at a = c the integral is evaluated in closed form on the tail and returns
    +inf when the singularity analysis says it diverges (an atom exactly at c,
    or a tail exponent too small).  a > c raises.
    """
    try:
        h, sing_order = _CATALOG[kind]
    except KeyError:
        raise ValueError(f"unknown integrand kind {kind!r}") from None
    c = m.c
    if kind == "c/(xi-c)":
        a = c
    if sing_order > 0 and a > c:
        raise ValueError(f"integrand {kind} requires a <= c, got a={a} > c={c}")
    atoms, tail = m.parts()

    if sing_order > 0 and a == c:
        # Coefficient of the (xi-c)^{-order} singularity as xi -> c.
        if kind == "a/(xi-a)":
            coeff_1, coeff_2 = c, 0.0
        elif kind in ("1/(xi-a)", "c/(xi-c)"):
            coeff_1, coeff_2 = (1.0, 0.0) if kind == "1/(xi-a)" else (c, 0.0)
        elif kind == "1/(xi-a)^2":
            coeff_1, coeff_2 = 0.0, 1.0
        else:  # xi/(xi-a)^2 = 1/(xi-c) + c/(xi-c)^2
            coeff_1, coeff_2 = 1.0, c
        if any(x == c for x, _ in atoms):
            return math.inf
        total = 0.0
        for x, w in atoms:  # all strictly above c here
            total += w * float(h(np.array([x]), a, c)[0])
        if tail is not None:
            kappa, nu, width = tail
            # closed forms: integral of s^(nu-k) over (0, width]
            if coeff_2 != 0.0 and nu <= 1.0:
                return math.inf
            if coeff_1 != 0.0 and nu <= 0.0:
                return math.inf
            if coeff_1 != 0.0:
                total += coeff_1 * kappa * (nu + 1.0) * width**nu / nu
            if coeff_2 != 0.0:
                total += coeff_2 * kappa * (nu + 1.0) * width ** (nu - 1.0) / (nu - 1.0)
        return total

    total = 0.0
    for x, w in atoms:
        total += w * float(h(np.array([x], dtype=float), a, c)[0])
    if tail is not None:
        kappa, nu, width = tail
        total += _tail_integral(h, a, c, kappa, nu, width)
    return total


def exp_law_from_measure(m: RateMeasure, n_rates: int = 0) -> EnvironmentLaw:
    """Environment law with exponential rows whose rates follow the measure.

    Pure-atom measures map directly to a finite mixture of exponential rows.
    A measure with a continuous tail segment is discretized into ``n_rates``
    equal-mass representative rates (conditional medians of equal-probability
    slices), which is only used for simulation cross-checks, never for the
    analytic formulas.
    """
    atoms, tail = m.parts()
    comps: list[tuple[RowDistribution, float]] = [
        (Exponential(rate=x), w) for x, w in atoms
    ]
    if tail is not None:
        if n_rates < 1:
            raise ValueError("measure has a continuous tail: pass n_rates >= 1")
        kappa, nu, width = tail
        mass = kappa * width ** (nu + 1.0)
        # equal-mass slices of the tail CDF  kappa * s^(nu+1)
        for j in range(n_rates):
            q = (j + 0.5) / n_rates
            s = width * q ** (1.0 / (nu + 1.0))
            comps.append((Exponential(rate=m.c + s), mass / n_rates))
    return EnvironmentLaw(components=tuple(comps))


# --- JSON round-trips -----------------------------------------------------------


def _dist_to_dict(dist: RowDistribution) -> dict:
    if isinstance(dist, Exponential):
        return {"kind": dist.kind, "rate": dist.rate}
    if isinstance(dist, Bernoulli):
        return {"kind": dist.kind, "p": dist.p}
    if isinstance(dist, FiniteDiscrete):
        return {"kind": dist.kind, "atoms": [list(a) for a in dist.atoms]}
    if isinstance(dist, TruncatedThreePart):
        return {
            "kind": dist.kind,
            "rate": dist.rate,
            "threshold": dist.threshold,
            "ptilde": dist.ptilde,
            "upper": dist.upper,
        }
    raise TypeError(f"unknown distribution {dist!r}")


def _dist_from_dict(d: dict) -> RowDistribution:
    kind = d.get("kind")
    if kind == "exponential":
        return Exponential(rate=d["rate"])
    if kind == "bernoulli":
        return Bernoulli(p=d["p"])
    if kind == "finite_discrete":
        return FiniteDiscrete(atoms=tuple((v, p) for v, p in d["atoms"]))
    if kind == "truncated_three_part":
        return TruncatedThreePart(
            rate=d["rate"], threshold=d["threshold"], ptilde=d["ptilde"], upper=d["upper"]
        )
    raise ValueError(f"unknown distribution kind {kind!r}")


def law_to_dict(law: EnvironmentLaw) -> dict:
    out = {
        "components": [
            {"dist": _dist_to_dict(d), "weight": w} for d, w in law.components
        ],
        "mode": law.mode,
    }
    if law.transition is not None:
        out["transition"] = [list(row) for row in law.transition]
    return out


def law_from_dict(d: dict) -> EnvironmentLaw:
    comps = tuple(
        (_dist_from_dict(c["dist"]), float(c["weight"])) for c in d["components"]
    )
    transition = d.get("transition")
    return EnvironmentLaw(
        components=comps,
        mode=d.get("mode", "iid"),
        transition=tuple(tuple(row) for row in transition) if transition else None,
    )


def measure_to_dict(m: RateMeasure) -> dict:
    out: dict = {"c": m.c, "atoms": [list(a) for a in m.atoms]}
    if m.tail is not None:
        kappa, nu, width = m.tail
        out["tail"] = {"kappa": kappa, "nu": nu, "width": width}
    return out


def measure_from_dict(d: dict) -> RateMeasure:
    tail = d.get("tail")
    return RateMeasure(
        c=float(d["c"]),
        atoms=tuple((float(x), float(w)) for x, w in d.get("atoms", [])),
        tail=(float(tail["kappa"]), float(tail["nu"]), float(tail["width"]))
        if tail
        else None,
    )
