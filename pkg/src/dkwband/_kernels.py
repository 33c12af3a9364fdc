"""Compiled per-trial simulation and enumeration kernels.

The Monte Carlo kernels are counter-based twins of :mod:`dkwband.rng`: trial
``i`` of master seed ``s`` derives its own stream seed, and value ``j`` of a
stream is a pure function of (seed, j), so results are independent of thread
count and trials can be replayed individually.  The sup-statistic kernel
regenerates the uniform stream twice (total, then running sum) to produce
sorted uniforms by normalized exponential spacings without storing or sorting
them; the resulting values are bit-identical to ``rng.sorted_uniforms``.

Candidate enumeration in ``sup_stats`` mirrors ``ecdf._candidates`` /
``ecdf.sup_deviation`` exactly (strict interior comparisons, rank counts at
range endpoints, minform kink at 1/2), so kernel statistics agree bitwise
with the scalar route on the same trial seed.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 2.0**-53

# sup_stats statistic selector
MODE_CLASSICAL = 0
MODE_VARIANCE = 1
MODE_MINFORM = 2
MODE_ZM = 3
MODE_SHIFTED_SLACK = 4


@njit(cache=True)
def _mix(x):
    x = (x ^ (x >> _S30)) * _MIX_A
    x = (x ^ (x >> _S27)) * _MIX_B
    return x ^ (x >> _S31)


@njit(cache=True)
def _trial_seed(master_seed, i):
    return _mix(np.uint64(master_seed) + np.uint64(i + 1) * GOLDEN)


@njit(cache=True)
def _raw(seed, j):
    return _mix(seed + np.uint64(j + 1) * GOLDEN)


@njit(cache=True)
def _u01(seed, j):
    # (0,1) strictly: top 53 bits, offset by half an ulp
    return (np.float64(_raw(seed, j) >> _S11) + 0.5) * _INV53


@njit(cache=True, parallel=True)
def sup_stats(master_seed, trial0, ntrials, m, mode, lo, hi, delta, out):
    """Per-trial exact sup statistics over sorted uniform samples of size m.

    mode 0: sup |F_m - u| over [0,1]                      (classical)
    mode 1: sup |F_m - u| / sqrt(u(1-u))   over [lo, hi]  (variance)
    mode 2: sup |F_m - u| / sqrt(min(u,1-u)) over [lo,hi] (minform, kink 1/2)
    mode 3: sup |F_m - u| / sqrt(u)        over [lo, hi]  (zm numerator)
    mode 4: sup |F_m - u| - sqrt(delta)*sqrt(u(1-u)) over [0,1]  (shifted slack)
    """
    sd = np.sqrt(delta)
    for t in prange(ntrials):
        seed = _trial_seed(master_seed, trial0 + t)
        total = 0.0
        for j in range(m + 1):
            total += -np.log(_u01(seed, j))
        run = 0.0
        best = 0.0 if (mode == 0 or mode == 4) else -1.0
        c_le_lo = 0
        c_le_hi = 0
        c_lt_hi = 0
        c_le_k = 0
        c_lt_k = 0
        for i in range(m):
            run += -np.log(_u01(seed, i))
            u = run / total
            if mode == 0:
                dev = max(u - i / m, (i + 1) / m - u)
                if dev > best:
                    best = dev
            elif mode == 4:
                slack = max(u - i / m, (i + 1) / m - u) - sd * np.sqrt(u * (1.0 - u))
                if slack > best:
                    best = slack
            else:
                if lo < u < hi:
                    dev = max(u - i / m, (i + 1) / m - u)
                    if mode == 1:
                        w = np.sqrt(u * (1.0 - u))
                    elif mode == 2:
                        w = np.sqrt(min(u, 1.0 - u))
                    else:
                        w = np.sqrt(u)
                    v = dev / w
                    if v > best:
                        best = v
                if u <= lo:
                    c_le_lo += 1
                if u <= hi:
                    c_le_hi += 1
                if u < hi:
                    c_lt_hi += 1
                if mode == 2:
                    if u <= 0.5:
                        c_le_k += 1
                    if u < 0.5:
                        c_lt_k += 1
        if mode == 1 or mode == 2 or mode == 3:
            if mode == 1:
                wlo = np.sqrt(lo * (1.0 - lo))
                whi = np.sqrt(hi * (1.0 - hi))
            elif mode == 2:
                wlo = np.sqrt(min(lo, 1.0 - lo))
                whi = np.sqrt(min(hi, 1.0 - hi))
            else:
                wlo = np.sqrt(lo)
                whi = np.sqrt(hi)
            v = abs(c_le_lo / m - lo) / wlo
            if v > best:
                best = v
            if hi > lo:
                v = abs(c_lt_hi / m - hi) / whi
                if v > best:
                    best = v
                v = abs(c_le_hi / m - hi) / whi
                if v > best:
                    best = v
            if mode == 2 and lo < 0.5 < hi:
                wk = np.sqrt(0.5)
                v = abs(c_lt_k / m - 0.5) / wk
                if v > best:
                    best = v
                v = abs(c_le_k / m - 0.5) / wk
                if v > best:
                    best = v
        out[t] = best


@njit(cache=True, parallel=True)
def prefix_max_stats(master_seed, trial0, ntrials, r, out):
    """Per-trial max_{l<=r} |S_l|/sqrt(l) over Rademacher paths.

    Signs come 64 per stream word (little-endian bit order, matching
    ``rng.signs``); the running best is tracked through its square so the
    square root is only taken on improvement.
    """
    for t in prange(ntrials):
        seed = _trial_seed(master_seed, trial0 + t)
        s = 0
        best2 = 0.0
        ell = 0
        j = 0
        while ell < r:
            w = _raw(seed, j)
            j += 1
            nb = min(64, r - ell)
            for b in range(nb):
                if (w >> np.uint64(b)) & _ONE:
                    s += 1
                else:
                    s -= 1
                ell += 1
                s2 = np.float64(s * s)
                if s2 > best2 * ell:  # divide only on improvement
                    best2 = s2 / ell
        out[t] = np.sqrt(best2)


@njit(cache=True)
def enum_prefix_max_mean(r):
    """Exact E max_{l<=r} |S_l|/sqrt(l) by full 2^r path enumeration."""
    inv = np.empty(r + 1)
    for ell in range(1, r + 1):
        inv[ell] = 1.0 / ell
    total = 0.0
    comp = 0.0
    npaths = 1 << r
    for k in range(npaths):
        s = 0
        best2 = 0.0
        for ell in range(1, r + 1):
            if (k >> (ell - 1)) & 1:
                s += 1
            else:
                s -= 1
            v = (s * s) * inv[ell]
            if v > best2:
                best2 = v
        # Kahan, so 2^24 additions stay exact to the last bit of the mean
        y = np.sqrt(best2) - comp
        tt = total + y
        comp = (tt - total) - y
        total = tt
    return total / npaths


@njit(cache=True)
def enum_levy_sums(n):
    """(sum of max_{j<=n} |S_j|, sum of |S_n|) over all 2^n paths, in int64."""
    tot_max = 0
    tot_abs = 0
    for k in range(1 << n):
        s = 0
        mx = 0
        for ell in range(n):
            if (k >> ell) & 1:
                s += 1
            else:
                s -= 1
            a = s if s >= 0 else -s
            if a > mx:
                mx = a
        tot_max += mx
        tot_abs += s if s >= 0 else -s
    return tot_max, tot_abs


@njit(cache=True)
def enum_block_count(m_max, checkpoints, int_thresholds):
    """Count 2^m_max paths where any |S_{checkpoints[c]}| >= int_thresholds[c]."""
    nc = checkpoints.shape[0]
    cnt = 0
    for k in range(1 << m_max):
        s = 0
        c = 0
        hit = False
        for ell in range(1, m_max + 1):
            if (k >> (ell - 1)) & 1:
                s += 1
            else:
                s -= 1
            if c < nc and ell == checkpoints[c]:
                a = s if s >= 0 else -s
                if a >= int_thresholds[c]:
                    hit = True
                c += 1
        if hit:
            cnt += 1
    return cnt


@njit(cache=True)
def enum_exceed_count(w, threshold):
    """Count sign patterns with |sum_i e_i w_i| >= threshold (2^len(w) paths).

    Gray-code order: each step flips exactly one sign, an O(1) update of the
    signed sum.
    """
    mlen = w.shape[0]
    s = 0.0
    for i in range(mlen):
        s -= w[i]
    cnt = 1 if abs(s) >= threshold else 0
    signs = np.full(mlen, -1.0)
    for k in range(1, 1 << mlen):
        j = 0
        kk = k
        while kk & 1 == 0:
            j += 1
            kk >>= 1
        s -= 2.0 * signs[j] * w[j]
        signs[j] = -signs[j]
        if abs(s) >= threshold:
            cnt += 1
    return cnt
