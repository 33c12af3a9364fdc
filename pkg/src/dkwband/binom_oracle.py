"""Exact binomial tail probabilities and closed-form comparison bounds.

Everything here is deterministic ground truth: tail probabilities are summed
in log space over the exact probability mass function, so they are reliable
down to the smallest representable magnitudes, and the closed-form bounds
(Bennett, Gaussian lower tail, the normal-approximation upper estimate) are
direct formula evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, ndtr, xlog1py, xlogy

from .ecdf import U_TOL
from .errors import DeltaMTooSmall, InvalidInput, OutOfRange

SIDES = ("two_sided", "upper", "lower")
DIRECTIONS = ("upper_thm51", "lower_prop52")


@dataclass(frozen=True)
class TailQuery:
    """A binomial deviation event: |Bin(m,p)/m - p| >= epsilon (per side)."""

    m: int
    p: float
    epsilon: float
    side: str = "two_sided"

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise InvalidInput("m must be a positive integer")
        if not (0.0 < self.p < 1.0):
            raise InvalidInput("p must lie in (0,1)")
        if not (self.epsilon >= 0.0 and math.isfinite(self.epsilon)):
            raise InvalidInput("epsilon must be a nonnegative real")
        if self.side not in SIDES:
            raise InvalidInput(f"side must be one of {SIDES}")


@dataclass(frozen=True)
class RegimeCheckResult:
    exact_prob: float
    bound_value: float
    regime: str
    satisfied: bool

    def __post_init__(self):
        if not (0.0 <= self.exact_prob <= 1.0):
            raise InvalidInput("exact_prob must lie in [0,1]")


def binom_log_pmf(m: int, p: float, k: int) -> float:
    """ln P(Bin(m,p) = k) via log-gamma."""
    if not (0 <= k <= m):
        raise InvalidInput(f"k={k} outside 0..{m}")
    if not (0.0 < p < 1.0):
        raise InvalidInput("p must lie in (0,1)")
    return float(
        gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)
        + xlogy(k, p) + xlog1py(m - k, -p)
    )


def _log_pmf_all(m: int, p: float) -> np.ndarray:
    ks = np.arange(m + 1)
    return (
        gammaln(m + 1) - gammaln(ks + 1) - gammaln(m - ks + 1)
        + xlogy(ks, p) + xlog1py(m - ks, -p)
    )


def deviation_prob(q: TailQuery) -> float:
    """Exact P(side-deviation of Bin(m,p)/m from p by >= epsilon).

    The two-sided event is the union of the tails (they only meet when
    epsilon = 0, where the probability is 1, never the naive sum).
    """
    m, p, eps = q.m, q.p, q.epsilon
    ks = np.arange(m + 1)
    upper = ks / m - p >= eps
    lower = p - ks / m >= eps
    if q.side == "upper":
        mask = upper
    elif q.side == "lower":
        mask = lower
    else:
        mask = upper | lower
    if not mask.any():
        return 0.0
    total = math.exp(logsumexp(_log_pmf_all(m, p)[mask]))
    return min(total, 1.0)


def bennett_bound(m: int, p: float, eps: float) -> float:
    """2 exp(-m v h(eps/v)), v = p(1-p), h(x) = (1+x)ln(1+x) - x."""
    if not (eps > 0.0 and math.isfinite(eps)):
        raise InvalidInput("eps must be positive")
    if not (0.0 < p < 1.0):
        raise InvalidInput("p must lie in (0,1)")
    if m < 1:
        raise InvalidInput("m must be >= 1")
    v = p * (1.0 - p)
    x = eps / v
    h = (1.0 + x) * math.log1p(x) - x
    return 2.0 * math.exp(-m * v * h)


def gaussian_tail_lower(lam: float, c: float) -> float:
    """max(0, phi(lam)/lam * (1 - c/lam^2)) -- a standard normal tail minorant."""
    if not (lam > 0.0 and math.isfinite(lam)):
        raise InvalidInput("lambda must be positive")
    phi = math.exp(-0.5 * lam * lam) / math.sqrt(2.0 * math.pi)
    return max(0.0, phi / lam * (1.0 - c / (lam * lam)))


def petrov_lower(n: int, lam: float, c1: float = 0.0, c2: float = 0.0, cap: float = 1.0) -> float:
    """Normal upper tail with moderate-deviation correction factors.

    Phi_bar(lam) * exp(c1 lam^3 / sqrt(n)) * (1 + c2 (lam+1)/sqrt(n)),
    valid for 0 <= lam <= cap * n^(1/6).
    """
    if n < 1:
        raise InvalidInput("n must be >= 1")
    limit = cap * n ** (1.0 / 6.0)
    if not (0.0 <= lam <= limit):
        raise OutOfRange(f"lambda {lam:g} outside [0, {limit:g}]")
    tail = float(ndtr(-lam))
    return tail * math.exp(c1 * lam**3 / math.sqrt(n)) * (1.0 + c2 * (lam + 1.0) / math.sqrt(n))


def fixed_t_lower_check(
    m: int, p: float, delta: float, consts, c_min: float = 8.0
) -> RegimeCheckResult:
    """Is the two-sided deviation by c2 sigma sqrt(delta) at least 2 exp(-c1 delta m)?

    Exact lower-bound witness at a fixed evaluation point in the core range
    sigma^2 >= delta; requires delta*m >= c_min.
    """
    sigma2 = p * (1.0 - p)
    if sigma2 < delta - U_TOL:
        raise OutOfRange(f"p(1-p) = {sigma2:g} < delta = {delta:g}")
    if delta * m < c_min:
        raise OutOfRange(f"delta*m = {delta * m:g} < c_min = {c_min:g}")
    eps = consts.c2 * math.sqrt(sigma2) * math.sqrt(delta)
    exact = deviation_prob(TailQuery(m, p, eps, "two_sided"))
    bound = 2.0 * math.exp(-consts.c1 * delta * m)
    return RegimeCheckResult(exact, bound, "core", exact >= bound)


def no_cancel_check(
    m: int, p: float, delta: float, consts, direction: str
) -> RegimeCheckResult:
    """Regime-wise deviation check for evaluation points with s = p(1-p) <= delta/10.

    Classifies the point as 'log' (s above exp(-delta m)/(10m)) or 'tiny' and
    compares the exact probability of deviating by the regime threshold
    (c2 delta/ln(delta/s), resp. c2 s) against 2 exp(-c1 delta m):
    ``upper_thm51`` requires exact <= bound, ``lower_prop52`` exact >= bound.
    The tiny lower witness is the closed form (1-p)^m 1{p >= threshold}.
    """
    if direction not in DIRECTIONS:
        raise InvalidInput(f"direction must be one of {DIRECTIONS}")
    s = p * (1.0 - p)
    if s > delta / 10.0:
        raise OutOfRange(f"p(1-p) = {s:g} > delta/10 = {delta / 10.0:g}")
    if delta * m < 10.0:
        raise DeltaMTooSmall(f"delta*m = {delta * m:g} < 10")
    if s > math.exp(-delta * m) / (10.0 * m):
        regime = "log"
        threshold = consts.c2 * delta / math.log(delta / s)
    else:
        regime = "tiny"
        threshold = consts.c2 * s
    bound = 2.0 * math.exp(-consts.c1 * delta * m)
    if direction == "lower_prop52" and regime == "tiny":
        exact = (1.0 - p) ** m if p >= threshold else 0.0
    else:
        exact = deviation_prob(TailQuery(m, p, threshold, "two_sided"))
    satisfied = exact <= bound if direction == "upper_thm51" else exact >= bound
    return RegimeCheckResult(exact, bound, regime, satisfied)
