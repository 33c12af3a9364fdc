"""Rademacher prefix-sum maxima: exact enumeration and seeded Monte Carlo.

The central statistic is max_{l<=r} |S_l|/sqrt(l) for S_l a +-1 random walk
(computed as sqrt(max_l S_l^2/l), exact for the integer prefix sums that occur
here).  Exact mode enumerates all 2^r sign paths; Monte Carlo uses one
counter-based stream per trial so estimates are reproducible for any worker
count and any single trial can be replayed from (seed, index).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels, rng
from .errors import ExactInfeasible, InvalidInput, OutOfRange

MODES = ("exact", "mc")
ENUM_MAX_PATH = 24  # 2^24 paths; beyond this exact enumeration is refused
ENUM_MAX_LEVY = 20


@dataclass(frozen=True)
class BlockConfig:
    """Geometric block layout m_l = xi^l for l in [s, eta*s]."""

    xi: int = 2
    eta: int = 8
    s0: int = 4

    def __post_init__(self):
        if not (isinstance(self.xi, (int, np.integer)) and self.xi >= 2):
            raise InvalidInput("xi must be an integer >= 2")
        if not (isinstance(self.eta, (int, np.integer)) and self.eta >= 1):
            raise InvalidInput("eta must be an integer >= 1")
        if not (isinstance(self.s0, (int, np.integer)) and self.s0 >= 2):
            raise InvalidInput("s0 must be an integer >= 2")


@dataclass(frozen=True)
class MaxStatResult:
    estimate: float
    std_error: float
    mode: str
    trials: int
    seed: int

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidInput(f"mode must be one of {MODES}")
        if not (self.estimate >= 0.0):
            raise InvalidInput("estimate must be nonnegative")
        if self.mode == "exact" and self.std_error != 0.0:
            raise InvalidInput("exact mode must report std_error 0")


def max_norm_prefix(signs, r: int) -> float:
    """max_{l<=r} |S_l|/sqrt(l) for the given +-1 sequence."""
    arr = np.asarray(signs, dtype=np.int64)
    if arr.ndim != 1 or not (1 <= r <= arr.size):
        raise InvalidInput(f"r must satisfy 1 <= r <= {arr.size}")
    if not np.all(np.abs(arr) == 1):
        raise InvalidInput("signs must be +-1")
    prefix = np.cumsum(arr[:r]).astype(np.float64)
    return float(np.sqrt(np.max(prefix * prefix / np.arange(1, r + 1))))


def expected_max(r: int, mode: str = "exact", trials: int = 0, seed: int = 0) -> MaxStatResult:
    """E max_{l<=r} |S_l|/sqrt(l): full enumeration or Monte Carlo mean."""
    if not (isinstance(r, (int, np.integer)) and r >= 1):
        raise InvalidInput("r must be a positive integer")
    if mode == "exact":
        if r > ENUM_MAX_PATH:
            raise ExactInfeasible(f"exact enumeration limited to r <= {ENUM_MAX_PATH}")
        est = float(_kernels.enum_prefix_max_mean(r))
        return MaxStatResult(est, 0.0, "exact", 1 << r, seed)
    if mode != "mc":
        raise InvalidInput(f"mode must be one of {MODES}")
    if trials < 1:
        raise InvalidInput("mc mode needs trials >= 1")
    out = np.empty(trials)
    _kernels.prefix_max_stats(rng.as_master(seed), 0, trials, r, out)
    se = float(out.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return MaxStatResult(float(out.mean()), se, "mc", trials, seed)


def _block_sizes(cfg: BlockConfig, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Checkpoint sizes m_l = xi^l and real thresholds (1/4)sqrt(m_l lnln m_l)."""
    ells = np.arange(s, cfg.eta * s + 1, dtype=np.int64)
    sizes = cfg.xi ** ells.astype(np.float64)
    if np.any(sizes > 2**62):
        raise InvalidInput("block sizes overflow machine range")
    sizes = (cfg.xi ** ells).astype(np.int64)
    thresholds = 0.25 * np.sqrt(sizes * np.log(np.log(sizes)))
    return sizes, thresholds


def block_event_prob(
    cfg: BlockConfig, s: int, mode: str = "exact", trials: int = 0, seed: int = 0
) -> MaxStatResult:
    """P( max_{s<=l<=eta*s} |S_{m_l}| / sqrt(m_l lnln m_l) >= 1/4 ).

    Exact mode enumerates all sign paths of length m_{eta*s} (the integer
    walk meets a real threshold, so ceil gives an exact integer event);
    Monte Carlo advances each path checkpoint-to-checkpoint with binomial
    increments and reports a Wilson-based std_error.
    """
    if not (isinstance(s, (int, np.integer)) and s >= cfg.s0):
        raise InvalidInput(f"s must be an integer >= s0 = {cfg.s0}")
    sizes, thresholds = _block_sizes(cfg, s)
    if mode == "exact":
        m_max = int(sizes[-1])
        if m_max > ENUM_MAX_PATH:
            raise ExactInfeasible(
                f"exact enumeration limited to m_max <= {ENUM_MAX_PATH}, got {m_max}"
            )
        int_thr = np.ceil(thresholds).astype(np.int64)
        cnt = int(_kernels.enum_block_count(m_max, sizes, int_thr))
        return MaxStatResult(cnt / float(1 << m_max), 0.0, "exact", 1 << m_max, seed)
    if mode != "mc":
        raise InvalidInput(f"mode must be one of {MODES}")
    if trials < 1:
        raise InvalidInput("mc mode needs trials >= 1")
    from .experiments import Z95, wilson_interval  # engine owns the interval code

    hits = 0
    for i in range(trials):
        gen = np.random.Generator(np.random.PCG64(rng.trial_seed(seed, i)))
        walk = 0
        prev = 0
        for m_l, thr in zip(sizes, thresholds):
            n_inc = int(m_l) - prev
            walk += 2 * int(gen.binomial(n_inc, 0.5)) - n_inc
            prev = int(m_l)
            if abs(walk) >= thr:
                hits += 1
                break
    lo, hi = wilson_interval(hits, trials)
    return MaxStatResult(hits / trials, (hi - lo) / (2.0 * Z95), "mc", trials, seed)


def ms_bound(w, lam: float, c3: float) -> float:
    """c3 * ( sum of the floor(lam) largest |w_i| + sqrt(lam) * l2-norm of the rest )."""
    ws = np.sort(np.abs(np.asarray(w, dtype=np.float64)))[::-1]
    if ws.ndim != 1 or ws.size == 0 or not np.all(np.isfinite(ws)):
        raise InvalidInput("w must be a nonempty finite weight vector")
    if not (0.0 < lam < ws.size - 1):
        raise OutOfRange(f"lambda must lie in (0, {ws.size - 1})")
    k = math.floor(lam)
    head = float(np.sum(ws[:k]))
    tail = float(np.sqrt(np.sum(ws[k:] ** 2)))
    return c3 * (head + math.sqrt(lam) * tail)


def weighted_exceed_prob(w, threshold: float) -> float:
    """Exact P(|sum_i e_i w_i| >= threshold) over all sign patterns."""
    ws = np.asarray(w, dtype=np.float64)
    if ws.ndim != 1 or ws.size == 0 or not np.all(np.isfinite(ws)):
        raise InvalidInput("w must be a nonempty finite weight vector")
    if ws.size > ENUM_MAX_PATH:
        raise ExactInfeasible(f"enumeration limited to len(w) <= {ENUM_MAX_PATH}")
    cnt = int(_kernels.enum_exceed_count(ws, float(threshold)))
    return cnt / float(1 << ws.size)


class LevyCheck(tuple):
    """(lhs, rhs) with lhs = E max_{j<=n}|S_j| and rhs = 2 E|S_n|."""

    __slots__ = ()

    def __new__(cls, lhs: float, rhs: float):
        return super().__new__(cls, (lhs, rhs))

    @property
    def lhs(self) -> float:
        return self[0]

    @property
    def rhs(self) -> float:
        return self[1]


def levy_symmetrization_check(n: int) -> LevyCheck:
    """Instance check of E max_{j<=n} |S_j| <= 2 E |S_n| by enumeration."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise InvalidInput("n must be a positive integer")
    if n > ENUM_MAX_LEVY:
        raise ExactInfeasible(f"enumeration limited to n <= {ENUM_MAX_LEVY}")
    tot_max, tot_abs = _kernels.enum_levy_sums(n)
    denom = float(1 << n)
    return LevyCheck(tot_max / denom, 2.0 * tot_abs / denom)
