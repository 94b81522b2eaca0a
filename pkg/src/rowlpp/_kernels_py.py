"""Numpy lane of the lattice kernels.

Every kernel preserves the per-cell algebra of the defining recursions — one
IEEE max of two neighbor values plus one add per cell — so results are
bit-identical to the compiled lane, to the exhaustive path oracle, and to the
tandem-queue event simulation.  Reformulations that would be faster but change
the rounding (prefix sums, blocking with re-association) are deliberately
avoided.

Array convention: ``W[j, i]`` is the weight of lattice cell (i, j) with i the
x-coordinate (column) and j the y-coordinate (row); row j is one environment
row.
"""

from __future__ import annotations

import numpy as np

LANE = "numpy"


def weak_weak(W: np.ndarray) -> float:
    """Last-passage value over weakly monotone nearest-neighbor paths.

    T(i,j) = X(i,j) + max(T(i-1,j), T(i,j-1)), out-of-grid = -inf, both
    endpoints included.  Evaluated along anti-diagonals (both arguments of the
    max live on the previous diagonal), with two rolling buffers of length
    min(dims)+1 — the full table is never materialized.
    """
    A = np.ascontiguousarray(W, dtype=np.float64)
    if A.size == 0:
        raise ValueError("empty weight grid")
    if A.shape[0] > A.shape[1]:
        # transpose symmetry: the max arguments swap, which cannot change an
        # IEEE max; keeps the rolling buffers on the smaller dimension
        A = np.ascontiguousarray(A.T)
    R, C = A.shape
    prev = np.full(R + 1, -np.inf)
    cur = np.full(R + 1, -np.inf)
    prev[0] = 0.0  # virtual neighbor of the origin: T(0,0) = X(0,0) + 0.0
    ii_all = np.arange(R)
    for d in range(R + C - 1):
        i0 = 0 if d <= C - 1 else d - C + 1
        i1 = min(R - 1, d)
        ii = ii_all[i0 : i1 + 1]
        np.maximum(prev[ii], prev[ii + 1], out=cur[i0 + 1 : i1 + 2])
        cur[i0 + 1 : i1 + 2] += A[ii, d - ii]
        prev, cur = cur, prev
        if d == 0:
            prev[0] = -np.inf
            cur[0] = -np.inf
    return float(prev[R])


def strict_x(W: np.ndarray) -> float:
    """Last-passage value over paths strict in x: one cell per column i, with
    column heights j nondecreasing and free endpoints.

    A(i,j) = X(i,j) + B(i-1,j); B(i,j) = max(B(i,j-1), A(i,j)); B(-1,j) = 0;
    answer B(k, l).  Per column this is one vector add followed by a running
    max, which np.maximum.accumulate evaluates in exactly the scalar order.
    """
    A = np.asarray(W, dtype=np.float64)
    if A.size == 0:
        raise ValueError("empty weight grid")
    cols = np.ascontiguousarray(A.T)  # cols[i] = weights of column i, contiguous
    B = np.zeros(A.shape[0])
    for i in range(cols.shape[0]):
        np.maximum.accumulate(cols[i] + B, out=B)
    return float(B[-1])


def strict_y(W: np.ndarray) -> float:
    """Transpose geometry of :func:`strict_x`: one cell per row, x nondecreasing."""
    A = np.asarray(W, dtype=np.float64)
    if A.size == 0:
        raise ValueError("empty weight grid")
    B = np.zeros(A.shape[1])
    for j in range(A.shape[0]):
        np.maximum.accumulate(A[j] + B, out=B)
    return float(B[-1])
