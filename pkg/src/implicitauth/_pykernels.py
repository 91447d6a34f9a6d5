"""Pure-Python threshold and decision kernels.

Twin of ``_ckernels.pyx``: same signatures, same floating-point operation
order, so both backends produce bit-identical streams. Warmup positions are
NaN in threshold arrays. Verdict codes: 0 warmup, 1 normal, 2 abnormal.
"""

from math import nan, sqrt

import numpy as np

WARMUP, NORMAL, ABNORMAL = 0, 1, 2


def block_stats(values, lo=0, hi=None, ddof=0):
    """Mean and standard deviation of ``values[lo:hi]`` (two-pass)."""
    if hi is None:
        hi = len(values)
    n = hi - lo
    if n <= 0:
        raise ValueError("block_stats of an empty block")
    s = 0.0
    for i in range(lo, hi):
        s += values[i]
    mean = s / n
    ss = 0.0
    for i in range(lo, hi):
        d = values[i] - mean
        ss += d * d
    denom = n - ddof
    sd = sqrt(ss / denom) if denom > 0 else 0.0
    return mean, sd


def _as_list(values):
    return np.asarray(values, dtype=np.float64).tolist()


def static_stream(values, n_train, ddof=0):
    v = _as_list(values)
    n = len(v)
    out = [nan] * n
    if n_train < 2:
        raise ValueError("static threshold needs at least 2 training scores")
    if n > n_train:
        mean, sd = block_stats(v, 0, n_train, ddof)
        thr = mean - sd
        for i in range(n_train, n):
            out[i] = thr
    return np.array(out, dtype=np.float64)


def sd_block_stream(values, block_len, ddof=0):
    v = _as_list(values)
    n = len(v)
    out = [nan] * n
    if block_len < 1:
        raise ValueError("block_len must be >= 1")
    start = block_len
    while start < n:
        mean, sd = block_stats(v, start - block_len, start, ddof)
        thr = mean - sd
        for i in range(start, min(start + block_len, n)):
            out[i] = thr
        start += block_len
    return np.array(out, dtype=np.float64)


def ewma_direct_stream(values, alpha):
    v = _as_list(values)
    n = len(v)
    out = [nan] * n
    beta = 1.0 - alpha
    if n:
        thr = v[0]
        out[0] = thr
        for i in range(1, n):
            thr = alpha * v[i - 1] + beta * thr
            out[i] = thr
    return np.array(out, dtype=np.float64)


def ewma_sd_block_stream(values, n_train, block_size, alpha, ddof=0):
    v = _as_list(values)
    n = len(v)
    out = [nan] * n
    if n_train < 1 or block_size < 1:
        raise ValueError("n_train and block_size must be >= 1")
    if n <= n_train:
        return np.array(out, dtype=np.float64)
    mean, sd = block_stats(v, 0, n_train, ddof)
    thr = mean - sd
    beta = 1.0 - alpha
    start = n_train
    while start < n:
        stop = min(start + block_size, n)
        for i in range(start, stop):
            out[i] = thr
        if stop - start == block_size:
            s = 0.0
            for i in range(start, stop):
                s += v[i]
            thr = alpha * (s / block_size) + beta * thr
        start = stop
    return np.array(out, dtype=np.float64)


def classify_stream(values, thresholds, tolerance):
    v = _as_list(values)
    t = _as_list(thresholds)
    if len(t) != len(v):
        raise ValueError("values and thresholds differ in length")
    out = [WARMUP] * len(v)
    for i in range(len(v)):
        thr = t[i]
        if thr != thr:
            continue
        if v[i] >= thr:
            out[i] = NORMAL
        elif v[i] >= thr - tolerance:
            out[i] = NORMAL
        else:
            out[i] = ABNORMAL
    return np.array(out, dtype=np.int8)
