"""Closed-form confidence-band envelopes and delta inversion.

Band kinds around the empirical CDF at resolution ``delta``:

- ``classical``: constant half-width sqrt(delta), failure <= 2 exp(-2 delta m).
- ``variance``: half-width sigma(u) sqrt(delta), valid where u(1-u) >= delta.
- ``minform``:  half-width sqrt(delta * min(u, 1-u)), valid on [delta, 1-delta].
- ``shifted``:  half-width delta + sigma(u) sqrt(delta), valid for all u.
- ``full_range``: the four-regime envelope (core / gap / log / tiny) that
  remains meaningful down to u(1-u) = 0; needs delta * m >= 10.

The variance/minform/full_range kinds carry a resolution floor
delta >= c0 * loglog(m) / m (natural logs twice); m >= 16 is required there so
that loglog(m) > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .ecdf import U_TOL, DistributionModel, SortedSample, range_bounds
from .errors import (
    DeltaInfeasible,
    DeltaMTooSmall,
    InvalidDelta,
    InvalidInput,
    OutOfRange,
)

BAND_KINDS = ("classical", "variance", "minform", "shifted", "full_range")
_FLOOR_KINDS = ("variance", "minform", "full_range")
REGIMES = ("core", "gap", "log", "tiny")


def loglog(m: int) -> float:
    """ln(ln(m)); requires m >= 3 so the value is positive."""
    if m < 3:
        raise InvalidInput("loglog(m) needs m >= 3")
    return math.log(math.log(m))


@dataclass(frozen=True)
class ConstantSet:
    """The absolute constants (c0: delta floor, c1: exponent, c2: width)."""

    c0: float = 4.0
    c1: float = 1.0
    c2: float = 1.0
    source: str = "default"

    def __post_init__(self):
        for name in ("c0", "c1", "c2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise InvalidInput(f"constant {name} must be strictly positive")


@dataclass(frozen=True)
class BandSpec:
    """A validated band request: kind + delta + sample size + constants."""

    kind: str
    m: int
    delta: float
    consts: ConstantSet = field(default_factory=ConstantSet)

    def __post_init__(self):
        if self.kind not in BAND_KINDS:
            raise InvalidInput(f"kind must be one of {BAND_KINDS}")
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise InvalidInput("m must be a positive integer")
        if not (0.0 < self.delta <= 0.25):
            raise InvalidDelta("delta must lie in (0, 1/4]")
        if self.kind in _FLOOR_KINDS:
            if self.m < 16:
                raise InvalidInput(f"{self.kind} band needs m >= 16 (loglog floor)")
            floor = self.consts.c0 * loglog(self.m) / self.m
            if self.delta < floor - U_TOL:
                raise InvalidDelta(
                    f"delta {self.delta:g} below floor c0*loglog(m)/m = {floor:g}"
                )


class ClassicalBand(NamedTuple):
    halfwidth: float
    failure_bound: float


class FullRangeWidth(NamedTuple):
    width: float
    regime: str


class DeltaChoice(NamedTuple):
    delta: float
    floor_active: bool


@dataclass(frozen=True)
class BandRow:
    """One evaluation point of a data band; side as in ecdf_eval."""

    t: float
    side: str
    lo: float
    hi: float


def classical_band(delta: float, m: int) -> ClassicalBand:
    """Half-width sqrt(delta) and failure bound min(1, 2 exp(-2 delta m))."""
    if not (delta > 0 and math.isfinite(delta)):
        raise InvalidDelta("delta must be positive")
    if m < 1:
        raise InvalidInput("m must be >= 1")
    return ClassicalBand(math.sqrt(delta), min(1.0, 2.0 * math.exp(-2.0 * delta * m)))


def variance_width(u: float, delta: float, mode: str = "variance") -> float:
    """sigma(u) sqrt(delta) (variance) or sqrt(delta min(u,1-u)) (minform)."""
    if not (0.0 < delta <= 0.25):
        raise InvalidDelta("delta must lie in (0, 1/4]")
    if mode == "variance":
        if u * (1.0 - u) < delta - U_TOL:
            raise OutOfRange(f"u={u:g} has sigma^2 < delta={delta:g}")
        return math.sqrt(u * (1.0 - u)) * math.sqrt(delta)
    if mode == "minform":
        if min(u, 1.0 - u) < delta - U_TOL:
            raise OutOfRange(f"u={u:g} outside [delta, 1-delta], delta={delta:g}")
        return math.sqrt(delta * min(u, 1.0 - u))
    raise InvalidInput("mode must be 'variance' or 'minform'")


def shifted_width(u: float, delta: float) -> float:
    """delta + sigma(u) sqrt(delta); defined for every u in [0,1]."""
    if not (0.0 < delta <= 0.25):
        raise InvalidDelta("delta must lie in (0, 1/4]")
    if not (0.0 <= u <= 1.0):
        raise OutOfRange("u must lie in [0,1]")
    return delta + math.sqrt(u * (1.0 - u)) * math.sqrt(delta)


def _full_range_width_s(s: float, delta: float, m: int, consts: ConstantSet) -> FullRangeWidth:
    """Regime-wise width as a function of s = u(1-u); s = 0 allowed (width 0)."""
    c2 = consts.c2
    if s >= delta:
        return FullRangeWidth(c2 * math.sqrt(s * delta), "core")
    if s > delta / 10.0:
        return FullRangeWidth(c2 * (delta + math.sqrt(s * delta)), "gap")
    if s > math.exp(-delta * m) / (10.0 * m):
        return FullRangeWidth(c2 * delta / math.log(delta / s), "log")
    return FullRangeWidth(c2 * s, "tiny")


def full_range_width(u: float, delta: float, m: int, consts: Optional[ConstantSet] = None) -> FullRangeWidth:
    """Envelope width at u for the four-regime full-range band.

    With s = u(1-u): core (s >= delta) width c2 sqrt(s delta); gap
    (delta/10 < s < delta) width c2 (delta + sqrt(s delta)); log
    (exp(-delta m)/(10m) < s <= delta/10) width c2 delta / ln(delta/s);
    tiny (below that) width c2 s.
    """
    if consts is None:
        consts = ConstantSet()
    if not (0.0 < delta <= 0.25):
        raise InvalidDelta("delta must lie in (0, 1/4]")
    if m < 1:
        raise InvalidInput("m must be >= 1")
    if delta * m < 10.0:
        raise DeltaMTooSmall(f"delta*m = {delta * m:g} < 10")
    if not (0.0 < u < 1.0):
        raise OutOfRange("u must lie in (0,1)")
    return _full_range_width_s(u * (1.0 - u), delta, m, consts)


def delta_for_confidence(m: int, failure_prob: float, consts: Optional[ConstantSet] = None) -> DeltaChoice:
    """Smallest admissible delta for a target failure probability.

    delta = max( ln(2/failure_prob) / (c1 m), c0 loglog(m) / m ); the second
    term is the resolution floor and ``floor_active`` reports whether it won.
    """
    if consts is None:
        consts = ConstantSet()
    if not (0.0 < failure_prob < 1.0):
        raise InvalidInput("failure_prob must lie in (0,1)")
    if m < 3:
        raise InvalidInput("m too small for the loglog floor")
    conf_term = math.log(2.0 / failure_prob) / (consts.c1 * m)
    floor_term = consts.c0 * loglog(m) / m
    delta = max(conf_term, floor_term)
    if delta > 0.25:
        raise DeltaInfeasible(f"required delta {delta:.6g} exceeds 1/4")
    if m < 16:
        raise InvalidInput("m must be >= 16 (loglog floor regime)")
    return DeltaChoice(delta, floor_term >= conf_term)


def _width_at(u: float, spec: BandSpec) -> float:
    """Band half-width with u substituted for the unknown F(t).

    For variance/minform the substituted u is clamped into the width's
    validity range (width -> delta at the edges), keeping the band total.
    """
    if spec.kind == "classical":
        return math.sqrt(spec.delta)
    if spec.kind == "shifted":
        return shifted_width(min(max(u, 0.0), 1.0), spec.delta)
    if spec.kind == "variance":
        lo, hi = range_bounds(spec.delta, "sigma2_ge_delta")
        return variance_width(min(max(u, lo), hi), spec.delta, "variance")
    if spec.kind == "minform":
        lo, hi = range_bounds(spec.delta, "min_ge_delta")
        return variance_width(min(max(u, lo), hi), spec.delta, "minform")
    if spec.kind == "full_range":
        u = min(max(u, 0.0), 1.0)
        return _full_range_width_s(u * (1.0 - u), spec.delta, spec.m, spec.consts).width
    raise InvalidInput(f"kind must be one of {BAND_KINDS}")


def data_band(
    s: SortedSample, spec: BandSpec, model: Optional[DistributionModel] = None
) -> list[BandRow]:
    """Confidence band rows around F_m at every order statistic (both sides).

    When ``model`` is given the width is evaluated at the true u = F(t);
    otherwise F_m(t) is substituted for the unknown F(t).  Rows are ordered
    (t ascending, left limit before at) and the lo/hi sequences are made
    nondecreasing by a running max, which preserves containment of F_m.
    """
    if spec.m != s.m:
        raise InvalidInput(f"spec.m = {spec.m} does not match sample m = {s.m}")
    vals = s.values
    m = s.m
    fm_lm = np.searchsorted(vals, vals, side="left") / m
    fm_at = np.searchsorted(vals, vals, side="right") / m
    if model is not None:
        u_lm = u_at = np.asarray(model.cdf(vals), dtype=np.float64)
    else:
        u_lm, u_at = fm_lm, fm_at

    rows: list[BandRow] = []
    run_lo = run_hi = 0.0
    for i in range(m):
        for side, fm, u in (("left-limit", fm_lm[i], u_lm[i]), ("at", fm_at[i], u_at[i])):
            w = _width_at(float(u), spec)
            lo = min(max(float(fm) - w, 0.0), 1.0)
            hi = min(max(float(fm) + w, 0.0), 1.0)
            if rows:
                lo, hi = max(lo, run_lo), max(hi, run_hi)
            run_lo, run_hi = lo, hi
            rows.append(BandRow(float(vals[i]), side, lo, hi))
    return rows
