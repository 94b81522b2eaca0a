"""Last-passage percolation simulator for row-random environments.

Grids live on Z^2 cells (i, j) with i the x-coordinate and j the y-coordinate
(the row index); the weight array is indexed ``W[j, i]``.  Three path
geometries are supported:

* ``weak-weak``  — nearest-neighbor up/right paths, both endpoints included:
  T(i,j) = X(i,j) + max(T(i-1,j), T(i,j-1)), out-of-grid = -inf.
* ``strict-x``   — exactly one cell per column, column heights nondecreasing,
  free endpoints: A(i,j) = X(i,j) + B(i-1,j), B(i,j) = max(B(i,j-1), A(i,j)),
  B(-1,j) = 0, value B(k,l).
* ``strict-y``   — the transpose of strict-x.

The dynamic programs, the exhaustive path oracle and the tandem-queue event
simulation all perform the identical max/+ operation per cell, so they agree
bit for bit, not merely within tolerance; the tests assert exact equality.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .envmodel import Bernoulli, EnvironmentLaw, EnvRealization, quantile, sample_environment

__all__ = [
    "PathGeometry",
    "WeightGrid",
    "SimEstimate",
    "sample_weight_grid",
    "last_passage",
    "brute_force_paths",
    "tandem_queue_departures",
    "estimate_time_constant",
    "simulate_tagged_speed",
    "tagged_speed_formula",
]


class PathGeometry(str, Enum):
    WEAK_WEAK = "weak-weak"
    STRICT_X = "strict-x"
    STRICT_Y = "strict-y"

    @classmethod
    def coerce(cls, value: "PathGeometry | str") -> "PathGeometry":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValueError(
                f"unknown geometry {value!r}; expected one of "
                f"{[g.value for g in cls]}"
            ) from None


@dataclass(eq=False)
class WeightGrid:
    """A realized weight array with its environment; ``weights[j, i]`` = X(i, j)."""

    weights: np.ndarray
    env: EnvRealization | None = None
    seed: int | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape


@dataclass(frozen=True)
class SimEstimate:
    """Monte-Carlo estimate of a normalized passage time."""

    geometry: PathGeometry
    x: float
    y: float
    n: int
    replicas: int
    seed: int
    mean: float
    stderr: float


def _as_weights(grid) -> np.ndarray:
    W = grid.weights if isinstance(grid, WeightGrid) else grid
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.size == 0:
        raise ValueError("weight grid must be a nonempty 2-d array")
    return W


def last_passage(grid, geometry) -> float:
    """Last-passage value of the grid under the given geometry.

    Time O(k*l); auxiliary memory O(min(k, l)) for the symmetric geometry and
    one rolling vector for the strict ones — the DP table is never stored.
    """
    W = _as_weights(grid)
    g = PathGeometry.coerce(geometry)
    if g is PathGeometry.WEAK_WEAK:
        return kernels.weak_weak(W)
    if g is PathGeometry.STRICT_X:
        return kernels.strict_x(W)
    return kernels.strict_y(W)


def brute_force_paths(grid, geometry) -> float:
    """Exhaustive-enumeration oracle for grids up to 8x8.

    Sums each admissible path in path order (left fold), which reproduces the
    DP's rounding exactly; the maximum over paths then equals the DP value bit
    for bit.
    """
    W = _as_weights(grid)
    g = PathGeometry.coerce(geometry)
    R, C = W.shape
    if R > 8 or C > 8:
        raise ValueError("brute force oracle is restricted to grids at most 8x8")
    rows = W.tolist()

    if g is PathGeometry.STRICT_Y:
        rows = W.T.tolist()
        R, C = C, R
        g = PathGeometry.STRICT_X

    best = -math.inf
    if g is PathGeometry.WEAK_WEAK:
        def walk(i: int, j: int, acc: float) -> None:
            nonlocal best
            if i == C - 1 and j == R - 1:
                if acc > best:
                    best = acc
                return
            if i + 1 < C:
                walk(i + 1, j, acc + rows[j][i + 1])
            if j + 1 < R:
                walk(i, j + 1, acc + rows[j + 1][i])

        walk(0, 0, rows[0][0])
    else:  # strict-x: one cell per column, heights nondecreasing
        def choose(i: int, jmin: int, acc: float) -> None:
            nonlocal best
            if i == C:
                if acc > best:
                    best = acc
                return
            for j in range(jmin, R):
                choose(i + 1, j, acc + rows[j][i])

        choose(0, 0, 0.0)
    return best


def tandem_queue_departures(grid) -> float:
    """Departure time of the last customer from the last station of a tandem
    of FIFO single-server queues.

    ``W[j, i]`` is the service time of customer i at station j; all customers
    start queued at station 0 at time zero, join the next queue on completion,
    and a freed server starts the next waiting customer immediately.  Each
    departure is service + max(own previous departure, server's previous
    departure) — the same max/+ per cell as the weak-weak recursion, evaluated
    customer by customer, so the result is bit-identical to that DP.
    """
    W = _as_weights(grid)
    if np.any(W < 0):
        raise ValueError("service times must be nonnegative")
    R, C = W.shape
    rows = W.tolist()
    free = [0.0] * R  # last departure seen by each station
    dep = 0.0
    for i in range(C):
        dep = 0.0  # customer i is available at station 0 from time 0
        for j in range(R):
            start = dep if dep > free[j] else free[j]
            dep = rows[j][i] + start
            free[j] = dep
    return dep


# ---------------------------------------------------------------------------
# Monte-Carlo estimation of the time constant
# ---------------------------------------------------------------------------


def _grid_cells(n: int, x: float, y: float) -> tuple[int, int]:
    # a tiny epsilon so decimal inputs like 0.3 * 10 floor to the intended 3
    nx = int(math.floor(n * x + 1e-9))
    ny = int(math.floor(n * y + 1e-9))
    if nx < 1 or ny < 1:
        raise ValueError(f"grid of {nx} x {ny} cells; need floor(n*x) and floor(n*y) >= 1")
    return nx, ny


def _fill_weights(law: EnvironmentLaw, indices, U: np.ndarray) -> np.ndarray:
    """Transform uniforms row-by-row through each row's quantile function, in
    place, grouped by component for vectorization."""
    idx = np.asarray(indices)
    for ci, (dist, _) in enumerate(law.components):
        sel = np.flatnonzero(idx == ci)
        if sel.size:
            U[sel] = quantile(dist, U[sel])
    return U


def sample_weight_grid(law: EnvironmentLaw, n_cols: int, n_rows: int, seed: int) -> WeightGrid:
    """Draw an environment of ``n_rows`` rows and a ``(n_rows, n_cols)`` weight
    array; deterministic given the seed.

    Uniform variables are drawn first and pushed through the row quantile
    functions, so two laws sampled with the same seed are coupled through the
    same underlying uniforms (monotone coupling).
    """
    if n_cols < 1 or n_rows < 1:
        raise ValueError("grid must have at least one column and one row")
    st = np.random.SeedSequence(seed).generate_state(2, np.uint64)
    env = sample_environment(law, n_rows, int(st[0]))
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(st[1]))))
    U = rng.random((n_rows, n_cols))
    W = _fill_weights(law, env.indices, U)
    return WeightGrid(weights=W, env=env, seed=seed)


def _replica_value(
    law: EnvironmentLaw, nx: int, ny: int, n: int, g: PathGeometry, seed: int, r: int
) -> float:
    st = np.random.SeedSequence(seed, spawn_key=(r,)).generate_state(1, np.uint64)
    grid = sample_weight_grid(law, nx, ny, int(st[0]))
    return last_passage(grid, g) / n


def estimate_time_constant(
    law: EnvironmentLaw,
    x: float,
    y: float,
    n: int,
    geometry,
    replicas: int,
    seed: int,
    workers: int | None = None,
) -> SimEstimate:
    """Estimate the time constant at direction (x, y) from ``replicas``
    independent grids of floor(n*x) x floor(n*y) cells, each normalized by n.

    Replica r draws its randomness from a child stream spawned off the master
    seed with key (r,), so the result is independent of scheduling: the same
    (seed, replicas) gives the same estimate for any worker count.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    g = PathGeometry.coerce(geometry)
    nx, ny = _grid_cells(n, x, y)
    if workers is None:
        workers = min(replicas, os.cpu_count() or 1, 4)
    vals = np.empty(replicas)
    if workers <= 1:
        for r in range(replicas):
            vals[r] = _replica_value(law, nx, ny, n, g, seed, r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            futs = {
                ex.submit(_replica_value, law, nx, ny, n, g, seed, r): r
                for r in range(replicas)
            }
            for fut, r in futs.items():
                vals[r] = fut.result()
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(replicas)) if replicas > 1 else 0.0
    return SimEstimate(
        geometry=g, x=x, y=y, n=n, replicas=replicas, seed=seed, mean=mean, stderr=stderr
    )


# ---------------------------------------------------------------------------
# Tagged-particle dynamics dual to the strict geometries
# ---------------------------------------------------------------------------


def _bernoulli_b(law: EnvironmentLaw) -> float:
    b = 0.0
    for dist, w in law.components:
        if not isinstance(dist, Bernoulli):
            raise ValueError("tagged-particle dynamics need an environment of Bernoulli rows")
        if w > 0.0:
            b = max(b, dist.p)
    return b


def _geom1(rng: np.random.Generator, p: float, size: int) -> np.ndarray:
    """Geometric on {1, 2, ...} with success probability p, by inversion from
    uniforms (keeps the stream independent of numpy's internal samplers)."""
    if p >= 1.0:
        return np.ones(size, dtype=np.int64)
    U = 1.0 - rng.random(size)  # in (0, 1]
    return np.floor(np.log(U) / math.log1p(-p)).astype(np.int64) + 1


def _success_sites(rng: np.random.Generator, p: float, base: int, hi: int) -> np.ndarray:
    """All success sites of a Bernoulli(p) row on the integers strictly above
    ``base``, generated through geometric spacings, guaranteed to extend past
    ``hi``."""
    span = hi - base
    n_exp = span * p
    n_draw = int(n_exp + 6.0 * math.sqrt(n_exp * (1.0 - p)) + 16.0)
    chunks = []
    cur = base
    while cur <= hi:
        c = np.cumsum(_geom1(rng, p, n_draw))
        c += cur
        chunks.append(c)
        cur = int(c[-1])
        n_draw = max(16, int((hi - cur) * p * 1.2 + 16))
    return chunks[0] if len(chunks) == 1 else np.concatenate(chunks)


def _step_strict_x(Z: np.ndarray, virt: int, pos: np.ndarray) -> np.ndarray:
    """One row of the strict-x dynamics on the chain [virt] + Z, in place.

    The defining update is the sequential sweep
    z'_k = min(z_k, succ1(z'_{k-1})), with succ1(x) the first success site
    strictly right of x and z'_{-1} = virt held fixed.  Unrolling the sweep:
    the post position of particle k is min(z_k, pos[C_k]) with
    C_k = min_{j<k}(S_j - j) + k - 1 over chain indices, S_j the number of
    sites <= the old position of chain particle j.  That prefix minimum is
    computed vectorially below; tests check exact agreement with the literal
    sweep.
    """
    W = Z.size
    if pos.size == 0:
        return Z
    S = np.searchsorted(pos, Z, side="right")
    bc = np.empty(W + 1, dtype=np.int64)
    bc[0] = 0  # the virtual particle: no site is <= virt by construction
    bc[1:] = S - np.arange(1, W + 1)
    idxs = np.minimum.accumulate(bc)[:-1] + np.arange(W)
    cand = np.where(idxs < pos.size, pos[np.minimum(idxs, pos.size - 1)], Z)
    np.minimum(Z, cand, out=Z)
    return Z


def _step_strict_y(Z: np.ndarray, virt: int, pos: np.ndarray) -> np.ndarray:
    """One row of the strict-y dynamics: the parallel update
    z'_k = min(z_k, first success site >= z_{k-1}(old)), with the old position
    of the left neighbor of particle 0 given by ``virt``."""
    if pos.size == 0:
        return Z
    queries = np.empty_like(Z)
    queries[0] = virt
    queries[1:] = Z[:-1]
    idx = np.searchsorted(pos, queries, side="left")
    cand = np.where(idx < pos.size, pos[np.minimum(idx, pos.size - 1)], Z)
    np.minimum(Z, cand, out=Z)
    return Z


def tagged_speed_formula(law: EnvironmentLaw, u: float, variant) -> float:
    """Closed-form stationary speed of the tagged particle at mean gap u."""
    g = PathGeometry.coerce(variant)
    b = _bernoulli_b(law)
    if g is PathGeometry.STRICT_X:
        if not (1.0 <= u and u * b < 1.0):
            raise ValueError("strict-x dynamics need 1 <= u < 1/b")
        return sum(
            w * dist.p * u * (u - 1.0) / (1.0 - u * dist.p)
            for dist, w in law.components
        )
    if g is PathGeometry.STRICT_Y:
        if u < 0.0:
            raise ValueError("strict-y dynamics need u >= 0")
        return u * (u + 1.0) * sum(
            w * dist.p / (1.0 + u * dist.p) for dist, w in law.components
        )
    raise ValueError("tagged-particle dynamics exist for the strict geometries only")


def simulate_tagged_speed(
    law: EnvironmentLaw,
    u: float,
    steps: int,
    seed: int,
    variant,
    window: int | None = None,
    reservoir: int = 128,
) -> float:
    """Simulate the tagged-particle process dual to a strict geometry and
    return the estimated leftward speed -z_tagged(steps)/steps.

    The infinite particle chain is truncated to a window of particles left of
    the tagged one (the dynamics only ever look left).  Truncating naively —
    holding the particle below the window fixed during a step — would be fatal,
    not small: the window can never pass that particle, so the whole chain
    compresses against it and every speed collapses to the boundary's.  The
    closure used instead:

    * strict-y updates read only the *old* position of the left neighbor, so
      one fresh stationary gap below the window per step closes the system;
      the product form of the invariant gap law makes the window's one-time
      marginals exact, and with them the estimated speed.
    * the strict-x sweep reads the *post-update* neighbor, so each step a
      fresh stationary reservoir chain of ``reservoir`` particles is laid
      below the window and the sweep runs through it before entering the
      window.  Along the sweep the update is a Lindley-type recursion that
      forgets its starting condition geometrically, so the constraint entering
      the window is correct up to a contraction factor to the power
      ``reservoir`` — far below statistical resolution.

    Every window particle then has the stationary speed, so the estimate
    averages all of their displacements; they decorrelate within a few indices,
    which cuts the variance well below the single-particle one.  Long runs are
    additionally split into blocks restarted from fresh stationary gaps:
    displacement fluctuations grow superdiffusively with the run length, so
    independent stationary blocks give a markedly smaller error than one
    continuous run of the same total length, at identical expectation.
    """
    g = PathGeometry.coerce(variant)
    if g is PathGeometry.WEAK_WEAK:
        raise ValueError("tagged-particle dynamics exist for the strict geometries only")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    b = _bernoulli_b(law)
    if g is PathGeometry.STRICT_X and not (1.0 <= u and u * b < 1.0):
        raise ValueError("strict-x dynamics need 1 <= u < 1/b")
    if g is PathGeometry.STRICT_Y and u < 0.0:
        raise ValueError("strict-y dynamics need u >= 0")

    W = window if window is not None else min(steps + 10, 512)
    W = max(int(W), 4)
    M = max(int(reservoir), 16)

    st = np.random.SeedSequence(seed).generate_state(2, np.uint64)
    env = sample_environment(law, steps, int(st[0]))
    pvals = np.array([dist.p for dist, _ in law.components])[np.asarray(env.indices)]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(st[1]))))

    def stationary_chain(size: int) -> np.ndarray:
        # rightmost particle at 0, stationary gaps to its left
        if g is PathGeometry.STRICT_X:
            gaps = _geom1(rng, 1.0 / u, size - 1)
        else:
            gaps = _geom1(rng, 1.0 / (1.0 + u), size - 1) - 1
        Z = np.zeros(size, dtype=np.int64)
        Z[:-1] = -np.cumsum(gaps[::-1])[::-1]
        return Z

    block = min(steps, 10_000)
    disp = 0.0  # window-averaged displacement, summed over blocks
    t = 0
    while t < steps:
        Z = stationary_chain(W)
        Z0 = Z.copy()
        t_end = min(t + block, steps)
        while t < t_end:
            p = float(pvals[t])
            t += 1
            if p == 0.0:
                continue  # no success anywhere on the row: nobody moves
            if g is PathGeometry.STRICT_X:
                # fresh stationary reservoir chain below the window, swept
                # through before the window so the entering constraint has
                # equilibrated by the time it arrives
                gv = _geom1(rng, 1.0 / u, M)
                chain = np.empty(M + W, dtype=np.int64)
                chain[M:] = Z
                chain[:M] = int(Z[0]) - np.cumsum(gv[::-1])[::-1]
                anchor = int(chain[0])
                pos = _success_sites(rng, p, anchor, int(Z[-1]))
                _step_strict_x(chain[1:], anchor, pos)
                Z = chain[M:]
            else:
                gap0 = int(_geom1(rng, 1.0 / (1.0 + u), 1)[0]) - 1
                virt = int(Z[0]) - gap0
                pos = _success_sites(rng, p, virt - 1, int(Z[-1]))
                _step_strict_y(Z, virt, pos)
        disp += float(np.mean(Z0 - Z))

    return disp / steps
