# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled lane of the lattice kernels.

Same per-cell algebra as the numpy lane (one IEEE max of the two neighbor
values plus one add per cell, in the defining dataflow order), so the two
lanes agree bit for bit.  Scalar sweeps in C with a single rolling buffer of
length min(dims)+1 for the symmetric geometry.
"""

from libc.math cimport INFINITY

import numpy as np

LANE = "cython"


cdef inline double _fmax2(double a, double b) noexcept nogil:
    # IEEE max of non-NaN doubles; matches np.maximum on the values that can
    # occur here (weights and partial sums, never NaN)
    return a if a > b else b


cdef double _weak_weak_impl(double[:, :] A, double[:] b) noexcept nogil:
    # row-major sweep of T(i,j) = X(i,j) + max(T(i-1,j), T(i,j-1)):
    # b[i+1] holds T(i, j-1) before the write and T(i, j) after; b[0] is the
    # virtual out-of-grid neighbor, 0.0 only while the origin is evaluated.
    cdef Py_ssize_t R = A.shape[0]
    cdef Py_ssize_t C = A.shape[1]
    cdef Py_ssize_t i, j
    cdef double left, up
    for j in range(R):
        for i in range(C):
            left = b[i]
            up = b[i + 1]
            b[i + 1] = A[j, i] + _fmax2(left, up)
            if j == 0 and i == 0:
                b[0] = -INFINITY
    return b[C]


cdef double _strict_x_impl(double[:, :] A, double[:] b) noexcept nogil:
    # row-major form of A(i,j) = X(i,j) + B(i-1,j); B(i,j) = max(B(i,j-1), A(i,j)):
    # b[i+1] holds B(i, j-1) before the write and B(i, j) after; b[0] stays at
    # the pinned left boundary B(-1, j) = 0.
    cdef Py_ssize_t R = A.shape[0]
    cdef Py_ssize_t C = A.shape[1]
    cdef Py_ssize_t i, j
    cdef double a
    for j in range(R):
        for i in range(C):
            a = A[j, i] + b[i]
            if a > b[i + 1]:
                b[i + 1] = a
    return b[C]


def weak_weak(W):
    A = np.asarray(W, dtype=np.float64)
    if A.size == 0:
        raise ValueError("empty weight grid")
    if A.shape[1] > A.shape[0]:
        # transpose symmetry of the recursion; rolling buffer on min(dims)
        A = A.T
    buf = np.full(A.shape[1] + 1, -np.inf)
    buf[0] = 0.0
    cdef double[:, :] mv = A
    cdef double[:] bv = buf
    cdef double out
    with nogil:
        out = _weak_weak_impl(mv, bv)
    return float(out)


def strict_x(W):
    A = np.asarray(W, dtype=np.float64)
    if A.size == 0:
        raise ValueError("empty weight grid")
    buf = np.full(A.shape[1] + 1, -np.inf)
    buf[0] = 0.0
    cdef double[:, :] mv = A
    cdef double[:] bv = buf
    cdef double out
    with nogil:
        out = _strict_x_impl(mv, bv)
    return float(out)


def strict_y(W):
    A = np.asarray(W, dtype=np.float64)
    if A.size == 0:
        raise ValueError("empty weight grid")
    AT = A.T
    buf = np.full(AT.shape[1] + 1, -np.inf)
    buf[0] = 0.0
    cdef double[:, :] mv = AT
    cdef double[:] bv = buf
    cdef double out
    with nogil:
        out = _strict_x_impl(mv, bv)
    return float(out)
