"""Counter-based splitmix64 random streams.

Every Monte Carlo trial gets its own stream, keyed as
``trial_seed = mix64(master_seed + (trial_index + 1) * GOLDEN)``; the j-th raw
64-bit output of a stream is ``mix64(trial_seed + (j + 1) * GOLDEN)``.  Because
draws are pure functions of (master_seed, trial_index, j), results never depend
on execution order, batching, or worker count, and any single trial can be
replayed in isolation.

The scalar reference implementations here use Python integers (exact modular
arithmetic); vectorized numpy twins operate on uint64 arrays; the numba kernels
in :mod:`dkwband._kernels` implement the same recurrence and are cross-checked
against this module in the test suite.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# double in (0,1) from the top 53 bits: ((x >> 11) + 0.5) * 2**-53
_INV53 = 2.0 ** -53


def mix64(x: int) -> int:
    """splitmix64 finalizer: a 64-bit avalanche permutation."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * _MIX_A) & _MASK
    x = ((x ^ (x >> 27)) * _MIX_B) & _MASK
    return x ^ (x >> 31)


def as_master(seed: int) -> np.uint64:
    """Any Python int reduced to the uint64 master seed the kernels take."""
    return np.uint64(seed & _MASK)


def trial_seed(master_seed: int, trial_index: int) -> int:
    """Stream key for one trial; avalanche-mixed so keys look independent."""
    return mix64(master_seed + (trial_index + 1) * GOLDEN)


def stream_u64(seed: int, j: int) -> int:
    """j-th raw 64-bit output of the stream with key ``seed``."""
    return mix64(seed + (j + 1) * GOLDEN)


def _mix64_array(x: np.ndarray) -> np.ndarray:
    x = x.astype(np.uint64, copy=True)
    x ^= x >> np.uint64(30)
    x *= np.uint64(_MIX_A)
    x ^= x >> np.uint64(27)
    x *= np.uint64(_MIX_B)
    x ^= x >> np.uint64(31)
    return x


def trial_seeds(master_seed: int, trial_indices: np.ndarray) -> np.ndarray:
    """Vectorized :func:`trial_seed` over an index array."""
    idx = np.asarray(trial_indices, dtype=np.uint64)
    base = np.uint64(master_seed & _MASK) + (idx + np.uint64(1)) * np.uint64(GOLDEN)
    return _mix64_array(base)


def stream_u64s(seed: int, n: int) -> np.ndarray:
    """Raw outputs j = 0..n-1 of one stream, as a uint64 array."""
    j = np.arange(1, n + 1, dtype=np.uint64)
    return _mix64_array(np.uint64(seed & _MASK) + j * np.uint64(GOLDEN))


def uniforms(seed: int, n: int) -> np.ndarray:
    """n doubles in the open interval (0,1) from one stream."""
    raw = stream_u64s(seed, n)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53


def signs(seed: int, n: int) -> np.ndarray:
    """n Rademacher signs (+-1 int8) from one stream, 64 per raw output.

    Bit order is little-endian within each output: sign k comes from bit
    ``k % 64`` of raw output ``k // 64``.
    """
    n_words = (n + 63) // 64
    raw = stream_u64s(seed, n_words)
    bits = np.unpackbits(raw.view(np.uint8), bitorder="little")[:n]
    return (bits.astype(np.int8) << 1) - 1


def sorted_uniforms(seed: int, m: int) -> np.ndarray:
    """m sorted uniforms via exponential spacings (no sort needed).

    With E_1..E_{m+1} iid Exp(1) and T their total, the normalized partial
    sums (E_1+..+E_i)/T are distributed exactly as the order statistics of m
    iid uniforms.
    """
    u = uniforms(seed, m + 1)
    e = -np.log(u)
    s = np.cumsum(e)
    return s[:m] / s[m]
