# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same contract as ``_pykernels``.

Matrix entries are 64-bit.  Any operand entry at or above 2**30 raises
``OverflowError`` so the caller can fall back to the exact Python path.
"""

from libc.math cimport sqrt, asinh
from libc.stdint cimport uint64_t
from libcpp.vector cimport vector

import numpy as np
cimport numpy as cnp

from .errors import BudgetExceeded

cnp.import_array()

ctypedef long long i64

cdef i64 LIMIT = 1073741824


cdef inline bint too_big(i64 a, i64 b, i64 c, i64 d):
    return (a >= LIMIT or a <= -LIMIT or b >= LIMIT or b <= -LIMIT
            or c >= LIMIT or c <= -LIMIT or d >= LIMIT or d <= -LIMIT)


cdef inline uint64_t mix(i64 a, i64 b, i64 c, i64 d):
    cdef uint64_t h = <uint64_t>a * 0x9E3779B97F4A7C15ULL
    h ^= <uint64_t>b + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2)
    h ^= <uint64_t>c + 0x85EBCA77C2B2AE63ULL + (h << 6) + (h >> 2)
    h ^= <uint64_t>d + 0xC2B2AE3D27D4EB4FULL + (h << 6) + (h >> 2)
    h ^= h >> 31
    h *= 0xBF58476D1CE4E5B9ULL
    h ^= h >> 29
    return h


cdef class _Table:
    """Open-addressing set of normalized matrices, stored by index into ``ent``."""

    cdef vector[i64] ent
    cdef vector[long] slots
    cdef uint64_t mask
    cdef long size

    def __cinit__(self):
        self.slots.assign(1024, -1)
        self.mask = 1023
        self.size = 0

    cdef long find(self, i64 a, i64 b, i64 c, i64 d):
        """Index of the matrix, or ``-1 - slot`` for the free slot where it belongs."""
        cdef uint64_t pos = mix(a, b, c, d) & self.mask
        cdef long k
        while True:
            k = self.slots[pos]
            if k < 0:
                return -1 - <long>pos
            if (self.ent[4 * k] == a and self.ent[4 * k + 1] == b
                    and self.ent[4 * k + 2] == c and self.ent[4 * k + 3] == d):
                return k
            pos = (pos + 1) & self.mask

    cdef void grow(self):
        cdef long n = <long>self.slots.size() * 2
        cdef long k
        cdef uint64_t pos
        self.slots.assign(n, -1)
        self.mask = <uint64_t>(n - 1)
        for k in range(self.size):
            pos = mix(self.ent[4 * k], self.ent[4 * k + 1], self.ent[4 * k + 2], self.ent[4 * k + 3]) & self.mask
            while self.slots[pos] >= 0:
                pos = (pos + 1) & self.mask
            self.slots[pos] = k

    cdef long add(self, long slot, i64 a, i64 b, i64 c, i64 d):
        cdef long k = self.size
        self.ent.push_back(a); self.ent.push_back(b); self.ent.push_back(c); self.ent.push_back(d)
        self.slots[slot] = k
        self.size += 1
        if 2 * self.size > <long>self.slots.size():
            self.grow()
        return k


cdef inline long lookup(_Table t, i64 *m):
    """Normalize ``m`` in place, then look it up."""
    cdef i64 lead = m[0]
    if lead == 0:
        lead = m[1]
    if lead == 0:
        lead = m[2]
    if lead == 0:
        lead = m[3]
    if lead < 0:
        m[0] = -m[0]; m[1] = -m[1]; m[2] = -m[2]; m[3] = -m[3]
    return t.find(m[0], m[1], m[2], m[3])


def ball_bfs(alphabet, int depth, long cap):
    cdef int nlet = len(alphabet)
    cdef vector[i64] let
    for mat in alphabet:
        for v in mat:
            if abs(v) >= LIMIT:
                raise OverflowError("generator entries exceed the 64-bit kernel range")
            let.push_back(<i64>v)
    cdef _Table table = _Table()
    cdef vector[long] par, lett, lev
    cdef vector[long] frontier, new
    cdef long i, n, fi, found
    cdef int j, k
    cdef i64 a, b, c, d, e, f, g, h
    cdef i64 m[4]
    cdef bint closed = True

    m[0] = 1; m[1] = 0; m[2] = 0; m[3] = 1
    table.add(-1 - lookup(table, m), 1, 0, 0, 1)
    par.push_back(-1); lett.push_back(-1); lev.push_back(0)
    frontier.push_back(0)
    for k in range(1, depth + 1):
        new.clear()
        for fi in range(<long>frontier.size()):
            i = frontier[fi]
            a = table.ent[4 * i]; b = table.ent[4 * i + 1]; c = table.ent[4 * i + 2]; d = table.ent[4 * i + 3]
            if too_big(a, b, c, d):
                raise OverflowError("matrix entries exceed the 64-bit kernel range")
            for j in range(nlet):
                e = let[4 * j]; f = let[4 * j + 1]; g = let[4 * j + 2]; h = let[4 * j + 3]
                m[0] = a * e + b * g; m[1] = a * f + b * h; m[2] = c * e + d * g; m[3] = c * f + d * h
                found = lookup(table, m)
                if found >= 0:
                    continue
                if table.size >= cap:
                    raise BudgetExceeded("word ball", cap)
                n = table.add(-1 - found, m[0], m[1], m[2], m[3])
                par.push_back(i); lett.push_back(j); lev.push_back(k)
                new.push_back(n)
        frontier.swap(new)
        if frontier.size() == 0:
            break
    for fi in range(<long>frontier.size()):
        i = frontier[fi]
        a = table.ent[4 * i]; b = table.ent[4 * i + 1]; c = table.ent[4 * i + 2]; d = table.ent[4 * i + 3]
        if too_big(a, b, c, d):
            raise OverflowError("matrix entries exceed the 64-bit kernel range")
        for j in range(nlet):
            e = let[4 * j]; f = let[4 * j + 1]; g = let[4 * j + 2]; h = let[4 * j + 3]
            m[0] = a * e + b * g; m[1] = a * f + b * h; m[2] = c * e + d * g; m[3] = c * f + d * h
            if lookup(table, m) < 0:
                closed = False
                break
        if not closed:
            break
    n = table.size
    cdef cnp.ndarray[cnp.int64_t, ndim=2] arr = np.empty((n, 4), dtype=np.int64)
    for i in range(n):
        arr[i, 0] = table.ent[4 * i]; arr[i, 1] = table.ent[4 * i + 1]
        arr[i, 2] = table.ent[4 * i + 2]; arr[i, 3] = table.ent[4 * i + 3]
    return (arr, np.asarray(<long[:n]>par.data(), dtype=np.int64).copy(),
            np.asarray(<long[:n]>lett.data(), dtype=np.int64).copy(),
            np.asarray(<long[:n]>lev.data(), dtype=np.int64).copy(), closed)


def orbit_scan(mats, tau0, double x, double y):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] m = np.asarray(mats, dtype=np.float64).reshape(-1, 4)
    cdef long n = m.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] re = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] im = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ratio = np.empty(n)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dist = np.empty(n)
    cdef double u = tau0.real
    cdef double v = tau0.imag
    cdef double e0 = ((x + y * u) * (x + y * u) + (y * v) * (y * v)) / v
    cdef double a, b, c, d, dr, di, d2, nr, ni, r, s, p, q
    cdef long i
    for i in range(n):
        a = m[i, 0]; b = m[i, 1]; c = m[i, 2]; d = m[i, 3]
        dr = c * u + d
        di = c * v
        d2 = dr * dr + di * di
        nr = a * u + b
        ni = a * v
        r = (nr * dr + ni * di) / d2
        s = v / d2
        re[i] = r
        im[i] = s
        p = x + y * r
        q = y * s
        ratio[i] = (p * p + q * q) / s / e0
        dist[i] = asinh(sqrt(((r - u) * (r - u) + (s - v) * (s - v)) / (4.0 * v * s)))
    return re, im, ratio, dist
