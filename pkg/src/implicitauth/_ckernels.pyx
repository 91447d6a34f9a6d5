# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled threshold and decision kernels; twin of ``_pykernels``."""

import numpy as np

from libc.math cimport NAN, sqrt, isnan

WARMUP, NORMAL, ABNORMAL = 0, 1, 2


cdef void _stats(const double[:] v, Py_ssize_t lo, Py_ssize_t hi, int ddof,
                 double* mean, double* sd) noexcept nogil:
    cdef Py_ssize_t i, n = hi - lo
    cdef double s = 0.0, ss = 0.0, d, m
    for i in range(lo, hi):
        s += v[i]
    m = s / n
    for i in range(lo, hi):
        d = v[i] - m
        ss += d * d
    mean[0] = m
    if n - ddof > 0:
        sd[0] = sqrt(ss / (n - ddof))
    else:
        sd[0] = 0.0


def block_stats(values, lo=0, hi=None, int ddof=0):
    cdef const double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef double mean, sd
    if hi is None:
        hi = v.shape[0]
    if hi - lo <= 0:
        raise ValueError("block_stats of an empty block")
    _stats(v, lo, hi, ddof, &mean, &sd)
    return mean, sd


def static_stream(values, Py_ssize_t n_train, int ddof=0):
    cdef const double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    out_arr = np.full(n, np.nan, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef double mean, sd, thr
    if n_train < 2:
        raise ValueError("static threshold needs at least 2 training scores")
    if n > n_train:
        _stats(v, 0, n_train, ddof, &mean, &sd)
        thr = mean - sd
        for i in range(n_train, n):
            out[i] = thr
    return out_arr


def sd_block_stream(values, Py_ssize_t block_len, int ddof=0):
    cdef const double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i, stop, start, n = v.shape[0]
    out_arr = np.full(n, np.nan, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef double mean, sd, thr
    if block_len < 1:
        raise ValueError("block_len must be >= 1")
    start = block_len
    while start < n:
        _stats(v, start - block_len, start, ddof, &mean, &sd)
        thr = mean - sd
        stop = start + block_len
        if stop > n:
            stop = n
        for i in range(start, stop):
            out[i] = thr
        start += block_len
    return out_arr


def ewma_direct_stream(values, double alpha):
    cdef const double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    out_arr = np.full(n, np.nan, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef double beta = 1.0 - alpha, thr
    if n:
        thr = v[0]
        out[0] = thr
        for i in range(1, n):
            thr = alpha * v[i - 1] + beta * thr
            out[i] = thr
    return out_arr


def ewma_sd_block_stream(values, Py_ssize_t n_train, Py_ssize_t block_size, double alpha, int ddof=0):
    cdef const double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t i, start, stop, n = v.shape[0]
    out_arr = np.full(n, np.nan, dtype=np.float64)
    cdef double[:] out = out_arr
    cdef double mean, sd, thr, s, beta = 1.0 - alpha
    if n_train < 1 or block_size < 1:
        raise ValueError("n_train and block_size must be >= 1")
    if n <= n_train:
        return out_arr
    _stats(v, 0, n_train, ddof, &mean, &sd)
    thr = mean - sd
    start = n_train
    while start < n:
        stop = start + block_size
        if stop > n:
            stop = n
        for i in range(start, stop):
            out[i] = thr
        if stop - start == block_size:
            s = 0.0
            for i in range(start, stop):
                s += v[i]
            thr = alpha * (s / block_size) + beta * thr
        start = stop
    return out_arr


def classify_stream(values, thresholds, double tolerance):
    cdef const double[:] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[:] t = np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef Py_ssize_t i, n = v.shape[0]
    if t.shape[0] != n:
        raise ValueError("values and thresholds differ in length")
    out_arr = np.zeros(n, dtype=np.int8)
    cdef signed char[:] out = out_arr
    cdef double thr
    for i in range(n):
        thr = t[i]
        if isnan(thr):
            continue
        if v[i] >= thr:
            out[i] = 1
        elif v[i] >= thr - tolerance:
            out[i] = 1
        else:
            out[i] = 2
    return out_arr
