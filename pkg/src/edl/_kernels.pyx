# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled clique-counting kernels over word-packed adjacency rows.

Row ``v`` of ``rows`` is the neighbourhood of vertex ``v`` packed little-endian
into ``W`` 64-bit words.  A candidate set is packed the same way.
"""
import numpy as np

from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free
from cython.parallel cimport prange

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef inline uint64_t _popcount(const uint64_t* a, Py_ssize_t lo, Py_ssize_t W) noexcept nogil:
    cdef uint64_t c = 0
    cdef Py_ssize_t j
    for j in range(lo, W):
        c += __builtin_popcountll(a[j])
    return c


cdef inline void _restrict(const uint64_t* cand, const uint64_t* row, Py_ssize_t wi, int b,
                           Py_ssize_t W, uint64_t* out) noexcept nogil:
    # out = cand & row & {bits strictly above (wi, b)}; words below wi are never read
    cdef Py_ssize_t j
    out[wi] = cand[wi] & row[wi] & ((~(<uint64_t>0) << b) << 1)
    for j in range(wi + 1, W):
        out[j] = cand[j] & row[j]


cdef uint64_t _rec(const uint64_t* rows, Py_ssize_t W, const uint64_t* cand, Py_ssize_t lo,
                   int l, uint64_t* buf) noexcept nogil:
    # l-cliques inside cand, where cand has no bits below word lo
    if l == 0:
        return 1
    if l == 1:
        return _popcount(cand, lo, W)
    cdef uint64_t total = 0
    cdef uint64_t word
    cdef Py_ssize_t wi, v
    cdef int b
    for wi in range(lo, W):
        word = cand[wi]
        while word:
            b = __builtin_ctzll(word)
            word &= word - 1
            v = wi * 64 + b
            _restrict(cand, rows + v * W, wi, b, W, buf)
            if l == 2:
                total += _popcount(buf, wi, W)
            else:
                total += _rec(rows, W, buf, wi, l - 1, buf + W)
    return total


cdef uint64_t _from_vertex(const uint64_t* rows, Py_ssize_t W, const uint64_t* cand,
                           Py_ssize_t v, int l) noexcept nogil:
    # l-cliques in cand whose lowest vertex is v
    cdef uint64_t* buf = <uint64_t*> malloc(l * W * sizeof(uint64_t))
    cdef uint64_t total
    if buf == NULL:
        return 0
    _restrict(cand, rows + v * W, v // 64, v % 64, W, buf)
    total = _rec(rows, W, buf, v // 64, l - 1, buf + W)
    free(buf)
    return total


def count_cliques_in(const uint64_t[:, ::1] rows, const uint64_t[::1] cand, int l, int threads=1):
    """Number of ``l``-cliques whose vertices all lie in ``cand``."""
    cdef Py_ssize_t W = rows.shape[1]
    if l == 0:
        return 1
    if W == 0:
        return 0
    if l == 1:
        return int(_popcount(&cand[0], 0, W))
    cdef Py_ssize_t[::1] verts = np.flatnonzero(
        np.unpackbits(np.asarray(cand).view(np.uint8), bitorder="little")
    ).astype(np.intp)
    cdef Py_ssize_t nv = verts.shape[0]
    cdef Py_ssize_t i
    cdef uint64_t total = 0
    cdef const uint64_t* rp = &rows[0, 0]
    cdef const uint64_t* cp = &cand[0]
    for i in prange(nv, nogil=True, num_threads=max(threads, 1), schedule="dynamic"):
        total += _from_vertex(rp, W, cp, verts[i], l)
    return int(total)
