# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the group-law batch kernels (same contract as _pykernels)."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

ctypedef long long i64


cdef inline i64 _mulmod(i64 a, i64 b, i64 mod, double inv) noexcept nogil:
    # a, b in [0, mod) with mod < 2**31: the double quotient is off by at most one
    cdef i64 q = <i64>(<double>a * <double>b * inv)
    cdef i64 r = a * b - q * mod
    if r < 0:
        r += mod
    elif r >= mod:
        r -= mod
    return r


cdef inline void _rmul(const i64* x, const i64* y, i64* out, const i64* T,
                       int m, i64 mod) noexcept nogil:
    # inputs reduced mod ``mod`` < 2**31; partial sums stay below m*m*mod
    cdef int a, b, c
    cdef i64 v, t
    cdef double inv = 1.0 / <double>mod
    if m == 1:
        out[0] = _mulmod(x[0], y[0], mod, inv)
        return
    for c in range(m):
        out[c] = 0
    for a in range(m):
        if x[a] == 0:
            continue
        for b in range(m):
            if y[b] == 0:
                continue
            v = _mulmod(x[a], y[b], mod, inv)
            for c in range(m):
                t = T[(a * m + b) * m + c]
                if t:
                    out[c] += _mulmod(v, t, mod, inv)
    for c in range(m):
        out[c] %= mod


def _check_mod(i64 mod):
    if mod <= 0 or mod >= (1 << 31):
        raise ValueError("compiled kernels need 0 < mod < 2**31")


def ring_mul_batch(X, Y, T, i64 mod):
    _check_mod(mod)
    cdef i64[:, ::1] xv = np.ascontiguousarray(X, dtype=np.int64) % mod
    cdef i64[:, ::1] yv = np.ascontiguousarray(Y, dtype=np.int64) % mod
    cdef i64[:, :, ::1] tv = np.ascontiguousarray(T, dtype=np.int64) % mod
    cdef Py_ssize_t B = xv.shape[0], m = xv.shape[1], b
    out = np.zeros((B, m), dtype=np.int64)
    cdef i64[:, ::1] ov = out
    with nogil:
        for b in range(B):
            _rmul(&xv[b, 0], &yv[b, 0], &ov[b, 0], &tv[0, 0, 0], <int>m, mod)
    return out


def law_mul_batch(X, Y, T, i64 mod, tout, tex, tey, tc, int maxdeg):
    _check_mod(mod)
    # coordinates are expected in [0, mod); reduce once here
    cdef i64[:, :, ::1] xv = np.ascontiguousarray(X, dtype=np.int64) % mod
    cdef i64[:, :, ::1] yv = np.ascontiguousarray(Y, dtype=np.int64) % mod
    cdef i64[:, :, ::1] tv = np.ascontiguousarray(T, dtype=np.int64) % mod
    cdef i64[::1] outv = np.ascontiguousarray(tout, dtype=np.int64)
    cdef i64[:, ::1] exv = np.ascontiguousarray(tex, dtype=np.int64)
    cdef i64[:, ::1] eyv = np.ascontiguousarray(tey, dtype=np.int64)
    cdef i64[:, ::1] cv = np.ascontiguousarray(tc, dtype=np.int64) % mod
    cdef Py_ssize_t B = xv.shape[0], d = xv.shape[1], m = xv.shape[2]
    cdef Py_ssize_t K = outv.shape[0]
    Z = np.zeros((B, d, m), dtype=np.int64)
    cdef i64[:, :, ::1] zv = Z
    cdef Py_ssize_t D1 = maxdeg + 1
    # highest exponent actually used per variable, so unused powers are skipped
    cdef i64[::1] topx = np.asarray(tex, dtype=np.int64).reshape(K, d).max(axis=0) if K else np.zeros(d, np.int64)
    cdef i64[::1] topy = np.asarray(tey, dtype=np.int64).reshape(K, d).max(axis=0) if K else np.zeros(d, np.int64)
    cdef i64* px = <i64*> malloc(d * D1 * m * sizeof(i64))
    cdef i64* py = <i64*> malloc(d * D1 * m * sizeof(i64))
    cdef i64* mono = <i64*> malloc(m * sizeof(i64))
    cdef i64* tmp = <i64*> malloc(m * sizeof(i64))
    cdef Py_ssize_t b, i, k, c, e
    cdef const i64* tp = &tv[0, 0, 0]
    if px == NULL or py == NULL or mono == NULL or tmp == NULL:
        free(px); free(py); free(mono); free(tmp)
        raise MemoryError()
    try:
        with nogil:
            for b in range(B):
                for i in range(d):
                    for c in range(m):
                        px[(i * D1 + 1) * m + c] = xv[b, i, c]
                        py[(i * D1 + 1) * m + c] = yv[b, i, c]
                    for e in range(2, topx[i] + 1):
                        _rmul(&px[(i * D1 + e - 1) * m], &px[(i * D1 + 1) * m],
                              &px[(i * D1 + e) * m], tp, <int>m, mod)
                    for e in range(2, topy[i] + 1):
                        _rmul(&py[(i * D1 + e - 1) * m], &py[(i * D1 + 1) * m],
                              &py[(i * D1 + e) * m], tp, <int>m, mod)
                for i in range(d):
                    for c in range(m):
                        zv[b, i, c] = 0
                for k in range(K):
                    for c in range(m):
                        mono[c] = cv[k, c]
                    for i in range(d):
                        e = exv[k, i]
                        if e:
                            _rmul(mono, &px[(i * D1 + e) * m], tmp, tp, <int>m, mod)
                            for c in range(m):
                                mono[c] = tmp[c]
                        e = eyv[k, i]
                        if e:
                            _rmul(mono, &py[(i * D1 + e) * m], tmp, tp, <int>m, mod)
                            for c in range(m):
                                mono[c] = tmp[c]
                    i = outv[k]
                    for c in range(m):
                        zv[b, i, c] += mono[c]
                for i in range(d):
                    for c in range(m):
                        zv[b, i, c] %= mod
    finally:
        free(px); free(py); free(mono); free(tmp)
    return Z
