# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels.  See ``_fallback.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint8_t

cnp.import_array()


def strike(uint8_t[::1] buf, int64_t lo, int64_t[::1] pk):
    cdef Py_ssize_t n = buf.shape[0]
    cdef Py_ssize_t t, i
    cdef int64_t m, start
    for t in range(pk.shape[0]):
        m = pk[t]
        start = (m - lo % m) % m
        i = <Py_ssize_t>start
        while i < n:
            buf[i] = 0
            i += m


def window_histogram(uint8_t[::1] bits, int64_t x, int64_t H):
    hist_arr = np.zeros(H + 1, dtype=np.int64)
    cdef int64_t[::1] hist = hist_arr
    cdef int64_t n, cur = 0
    if x <= 0:
        return hist_arr
    for n in range(H):
        cur += bits[n]
    hist[cur] += 1
    # window for n covers bits[n-1 .. n+H-2]
    for n in range(2, x + 1):
        cur += bits[n + H - 2] - bits[n - 2]
        hist[cur] += 1
    return hist_arr


cdef inline int _distinct(int64_t* v, int j):
    cdef int a, b, d = 0
    cdef bint seen
    for a in range(j):
        seen = False
        for b in range(a):
            if v[b] == v[a]:
                seen = True
                break
        if not seen:
            d += 1
    return d


cdef int64_t _code_single(int j, int npk):
    # single value: d = 1 and every residue count is 1
    cdef int64_t code = 1, scale = j + 1
    cdef int t
    for t in range(npk):
        code += scale
        scale *= j + 1
    return code


def pattern_codes(int64_t m, int j, int64_t[::1] pk, int64_t s_lo, int64_t s_hi):
    cdef int64_t s_top = s_hi if s_hi < m else m
    cdef int64_t total = 0, s
    cdef int64_t c, num, den
    cdef int t
    if j == 1:
        if s_lo <= 0 < s_top:
            return np.array([_code_single(j, pk.shape[0])], dtype=np.int64), np.array([m], dtype=np.int64)
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    # count patterns: for each s, C(s + j - 2, j - 2)
    for s in range(s_lo, s_top):
        num = 1
        den = 1
        for t in range(1, j - 1):
            num *= s + t
            den *= t
        total += num // den
    codes_arr = np.empty(total, dtype=np.int64)
    weights_arr = np.empty(total, dtype=np.int64)
    cdef int64_t[::1] codes = codes_arr
    cdef int64_t[::1] weights = weights_arr
    cdef int64_t vals[64]
    cdef int64_t res[64]
    cdef int64_t jf = 1
    cdef int64_t pf, run, code, scale, base = j + 1
    cdef Py_ssize_t idx = 0
    cdef int i, p_i, npk = pk.shape[0]
    cdef int inner = j - 2
    if j > 64:
        raise ValueError("pattern length above 64 unsupported")
    for t in range(2, j + 1):
        jf *= t
    for s in range(s_lo, s_top):
        vals[0] = 0
        vals[j - 1] = s
        for i in range(1, j - 1):
            vals[i] = 0
        while True:
            # multiplicities of the sorted tuple
            pf = 1
            run = 1
            for i in range(1, j):
                if vals[i] == vals[i - 1]:
                    run += 1
                    pf *= run
                else:
                    run = 1
            code = _distinct(vals, j)
            scale = base
            for p_i in range(npk):
                for i in range(j):
                    res[i] = vals[i] % pk[p_i]
                code += scale * _distinct(res, j)
                scale *= base
            codes[idx] = code
            weights[idx] = (jf // pf) * (m - s)
            idx += 1
            # next non-decreasing middle block in [0, s]
            if inner == 0:
                break
            i = inner
            while i >= 1 and vals[i] == s:
                i -= 1
            if i == 0:
                break
            vals[i] += 1
            for c in range(i + 1, j - 1):
                vals[c] = vals[i]
    return codes_arr, weights_arr
