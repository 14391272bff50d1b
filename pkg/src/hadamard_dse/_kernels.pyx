# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled butterfly kernels; same contract as ``_kernels_py``."""
from libc.stdint cimport int64_t

cdef double INV_SQRT2 = 0.70710678118654752440


def fht_real_batch(double[:, ::1] x, int m):
    cdef Py_ssize_t batch = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    cdef Py_ssize_t r, s, h, blk, j, i0, i1
    cdef double a, b
    with nogil:
        for r in range(batch):
            for s in range(1, m + 1):
                h = (<Py_ssize_t>1) << (m - s)
                blk = 0
                while blk < n:
                    for j in range(h):
                        i0 = blk + j
                        i1 = i0 + h
                        a = x[r, i0]
                        b = x[r, i1]
                        x[r, i0] = (a + b) * INV_SQRT2
                        x[r, i1] = (a - b) * INV_SQRT2
                    blk += 2 * h


cdef inline int64_t _halve(int64_t t) nogil:
    # round-half-away-from-zero of t/2 without a branch: for t < 0 this is
    # floor(t/2) == t >> 1, for t >= 0 it is (t + 1) >> 1
    return (t + 1 + (t >> 63)) >> 1


def fht_fixed_batch(int64_t[:, ::1] x, int m):
    cdef Py_ssize_t batch = x.shape[0]
    cdef Py_ssize_t n = x.shape[1]
    cdef Py_ssize_t r, s, h, blk, j, i0, i1
    cdef int64_t a, b
    with nogil:
        for r in range(batch):
            for s in range(1, m + 1):
                h = (<Py_ssize_t>1) << (m - s)
                blk = 0
                if s & 1:
                    while blk < n:
                        for j in range(h):
                            i0 = blk + j
                            i1 = i0 + h
                            a = x[r, i0]
                            b = x[r, i1]
                            x[r, i0] = a + b
                            x[r, i1] = a - b
                        blk += 2 * h
                else:
                    while blk < n:
                        for j in range(h):
                            i0 = blk + j
                            i1 = i0 + h
                            a = x[r, i0]
                            b = x[r, i1]
                            x[r, i0] = _halve(a + b)
                            x[r, i1] = _halve(a - b)
                        blk += 2 * h
