"""Seeded Monte Carlo engine: coverage rates, constant calibration, curves.

All simulation happens in uniform space — by the exact distribution-freeness
of the sup statistics (see :mod:`dkwband.ecdf`), non-uniform continuous models
would produce bit-identical results, so the model argument only selects the
documentation of what was simulated.  Every trial owns a counter-based stream
(:mod:`dkwband.rng`), per-trial statistics land in an output array, and all
aggregation happens afterwards in a fixed order; reports are therefore
byte-identical for any worker count.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels, rng
from .bands import BandSpec, ConstantSet, loglog
from .ecdf import DistributionModel, range_bounds
from .errors import CalibrationFailed, InvalidDelta, InvalidInput

Z95 = 1.959964  # 95% score-interval critical value

C0_SWEEP = (1.0, 2.0, 4.0, 8.0, 16.0)
C1_SWEEP = (0.25, 0.5, 1.0, 2.0)

# band kind -> (kernel statistic mode, violation threshold as function of delta)
_COVERAGE_KINDS = {
    "classical": (_kernels.MODE_CLASSICAL, math.sqrt),
    "variance": (_kernels.MODE_VARIANCE, math.sqrt),
    "minform": (_kernels.MODE_MINFORM, math.sqrt),
    "shifted": (_kernels.MODE_SHIFTED_SLACK, float),
}

_RANGE_FOR_KIND = {"variance": "sigma2_ge_delta", "minform": "min_ge_delta"}

DELTA_RULES = ("fixed_over_m", "loglog_rule")

_DATA_DIR = Path(__file__).resolve().parent / "data"
CALIBRATED_PATH = _DATA_DIR / "calibrated.json"


@dataclass(frozen=True)
class CoverageReport:
    band_kind: str
    m: int
    delta: float
    trials: int
    violations: int
    rate: float
    wilson_lo: float
    wilson_hi: float
    master_seed: int

    def __post_init__(self):
        if not (0 <= self.violations <= self.trials):
            raise InvalidInput("violations must lie in [0, trials]")
        if self.rate != self.violations / self.trials:
            raise InvalidInput("rate must equal violations/trials")
        if not (self.wilson_lo <= self.rate <= self.wilson_hi):
            raise InvalidInput("Wilson interval must contain the rate")


@dataclass(frozen=True)
class CalibrationResult:
    consts: ConstantSet
    target_family: str
    grid: tuple
    achieved: tuple
    seed: int


@dataclass(frozen=True)
class CurvePoint:
    x: float
    estimate: float
    std_error: float
    ratio: Optional[float] = None

    def __post_init__(self):
        if not (self.std_error >= 0.0):
            raise InvalidInput("std_error must be nonnegative")


@dataclass(frozen=True)
class ExpectationCheck:
    mean_ratio: float
    bound: float


def wilson_interval(k: int, n: int, z: float = Z95) -> tuple[float, float]:
    """95% score interval for a binomial proportion; always contains k/n."""
    if not (0 <= k <= n and n >= 1):
        raise InvalidInput("need 0 <= k <= n, n >= 1")
    phat = k / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z * z / (4.0 * n * n)) / denom
    # rounding can push an endpoint across phat at k = 0 or k = n
    return max(0.0, min(center - half, phat)), min(1.0, max(center + half, phat))


def _sup_stat_batch(
    kind: str, m: int, delta: float, master_seed: int, trial0: int, ntrials: int
) -> np.ndarray:
    """Per-trial exact sup statistics for one band kind, via the kernel."""
    mode, _ = _COVERAGE_KINDS[kind]
    if kind in _RANGE_FOR_KIND:
        lo, hi = range_bounds(delta, _RANGE_FOR_KIND[kind])
    else:
        lo, hi = 0.0, 1.0
    out = np.empty(ntrials)
    _kernels.sup_stats(rng.as_master(master_seed), trial0, ntrials, m, mode, lo, hi, delta, out)
    return out


def coverage_experiment(
    band_kind: str,
    m: int,
    delta: float,
    model: DistributionModel,
    trials: int,
    master_seed: int,
    consts: Optional[ConstantSet] = None,
) -> CoverageReport:
    """Monte Carlo rate of the event that F escapes the band anywhere.

    A trial is a violation when the exact sup statistic strictly exceeds the
    band threshold (sqrt(delta), or delta for the shifted band); boundary
    equality counts as covered.
    """
    if band_kind not in _COVERAGE_KINDS:
        raise InvalidInput(
            f"band_kind must be one of {tuple(_COVERAGE_KINDS)} (full_range widths are per-point)"
        )
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    if not isinstance(model, DistributionModel):
        raise InvalidInput("model must be a DistributionModel")
    spec = (
        BandSpec(band_kind, m, delta)
        if consts is None
        else BandSpec(band_kind, m, delta, consts)
    )
    _, thr_fn = _COVERAGE_KINDS[band_kind]
    threshold = thr_fn(spec.delta)
    stats = _sup_stat_batch(band_kind, m, spec.delta, master_seed, 0, trials)
    violations = int(np.count_nonzero(stats > threshold))
    lo, hi = wilson_interval(violations, trials)
    return CoverageReport(
        band_kind, m, spec.delta, trials, violations, violations / trials, lo, hi, master_seed
    )


def calibrate_constants(
    band_kind: str,
    m_grid: Sequence[int],
    target_rule: str = "rate+wilson_hw<=2exp(-c1*delta*m)",
    seed: int = 0,
    trials_per_cell: int = 10**4,
) -> CalibrationResult:
    """Smallest workable c0 and the largest c1 the observed rates support.

    For each c0 in the doubling sweep, every cell m of the grid is simulated
    at delta = c0*loglog(m)/m; a cell admits c1 when
    rate + Wilson half-width <= 2 exp(-c1*delta*m).  The first c0 whose cells
    all admit some c1 wins, with the global c1 the minimum over cells of the
    per-cell largest admissible value (admissible sets are downward closed, so
    the returned pair satisfies every cell).  Deterministic given seed; cell
    seeds are derived per (c0, m) so evaluation order never matters.
    """
    if band_kind not in _COVERAGE_KINDS:
        raise InvalidInput(f"band_kind must be one of {tuple(_COVERAGE_KINDS)}")
    if len(m_grid) == 0:
        raise InvalidInput("m_grid must be nonempty")
    if trials_per_cell < 10**4:
        raise InvalidInput("trials_per_cell must be >= 10^4")
    ms = sorted(int(m) for m in m_grid)
    if ms[0] < 16:
        raise InvalidInput("calibration grid needs m >= 16 (loglog floor)")
    vacuous = target_rule == "vacuous"
    if not vacuous and target_rule != "rate+wilson_hw<=2exp(-c1*delta*m)":
        raise InvalidInput("unknown target_rule")

    def bound(c1: float, m: int, delta: float) -> float:
        return 1.0 if vacuous else 2.0 * math.exp(-c1 * delta * m)

    _, thr_fn = _COVERAGE_KINDS[band_kind]
    frontier: list[dict] = []
    for c0_idx, c0 in enumerate(C0_SWEEP):
        cells = [(m, c0 * loglog(m) / m) for m in ms]
        if any(not (0.0 < d <= 0.25) for _, d in cells):
            frontier.append({"c0": c0, "reason": "delta outside (0, 1/4]"})
            continue
        round_key = rng.trial_seed(seed, c0_idx)
        per_cell_c1: list[float] = []
        measured: list[dict] = []
        feasible = True
        for m_idx, (m, delta) in enumerate(cells):  # cheapest m first
            cell_master = rng.trial_seed(round_key, m_idx)
            stats = _sup_stat_batch(band_kind, m, delta, cell_master, 0, trials_per_cell)
            viol = int(np.count_nonzero(stats > thr_fn(delta)))
            rate = viol / trials_per_cell
            lo, hi = wilson_interval(viol, trials_per_cell)
            hw = (hi - lo) / 2.0
            admissible = [c1 for c1 in C1_SWEEP if rate + hw <= bound(c1, m, delta)]
            measured.append(
                {"c0": c0, "m": m, "delta": delta, "rate": rate, "wilson_hw": hw}
            )
            if not admissible:
                feasible = False
                break
            per_cell_c1.append(max(admissible))
        frontier.extend(measured)
        if not feasible:
            continue
        c1 = min(per_cell_c1)
        achieved = tuple(
            med["rate"] + med["wilson_hw"] <= bound(c1, med["m"], med["delta"])
            for med in measured
        )
        if not all(achieved):
            raise AssertionError("downward closure violated")  # unreachable
        consts = ConstantSet(
            c0=c0,
            c1=c1,
            c2=1.0,
            source=f"calibrated({band_kind}, seed={seed}, trials_per_cell={trials_per_cell})",
        )
        return CalibrationResult(
            consts, target_rule, tuple(cells), achieved, seed
        )
    raise CalibrationFailed("no admissible (c0, c1) pair in the sweep", frontier=frontier)


def _parse_delta_rule(delta_rule) -> tuple[str, float]:
    if isinstance(delta_rule, str):
        name, _, coeff = delta_rule.partition(":")
        if not coeff:
            raise InvalidInput("delta_rule string must look like 'fixed_over_m:4'")
        rule = (name, float(coeff))
    else:
        rule = (str(delta_rule[0]), float(delta_rule[1]))
    if rule[0] not in DELTA_RULES or not (rule[1] > 0):
        raise InvalidInput(f"delta_rule must be one of {DELTA_RULES} with positive coefficient")
    return rule


def rule_delta(delta_rule, m: int) -> float:
    """Evaluate a delta rule at m: c/m, or c*loglog(m)/m."""
    name, c = _parse_delta_rule(delta_rule)
    return c / m if name == "fixed_over_m" else c * loglog(m) / m


def zm_curve(
    m_grid: Sequence[int], delta_rule, trials: int, seed: int
) -> list[CurvePoint]:
    """Per m: mean and std error of sup_{[2d, 1/2]} |F_m-u|/(sqrt(u) sqrt(d))."""
    if len(m_grid) == 0:
        raise InvalidInput("m_grid must be nonempty")
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    _parse_delta_rule(delta_rule)
    points = []
    for j, m in enumerate(int(m) for m in m_grid):
        delta = rule_delta(delta_rule, m)
        if not (0.0 < delta < 0.25):
            raise InvalidDelta(f"delta_rule gives delta = {delta:g} outside (0, 1/4) at m = {m}")
        lo, hi = range_bounds(delta, "f_in_2delta_half")
        out = np.empty(trials)
        _kernels.sup_stats(
            rng.as_master(rng.trial_seed(seed, j)), 0, trials, m, _kernels.MODE_ZM, lo, hi, delta, out
        )
        zs = out / math.sqrt(delta)
        se = float(zs.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        points.append(CurvePoint(float(m), float(zs.mean()), se))
    return points


def lil_curve(r_grid: Sequence[int], trials: int, seed: int) -> list[CurvePoint]:
    """Per r: MC estimate of E max_{l<=r}|S_l|/sqrt(l) and its ratio to sqrt(lnln r)."""
    if len(r_grid) == 0:
        raise InvalidInput("r_grid must be nonempty")
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    rs = [int(r) for r in r_grid]
    if any(r < 16 for r in rs):
        raise InvalidInput("r must be >= 16 (loglog positive)")
    points = []
    for j, r in enumerate(rs):
        out = np.empty(trials)
        _kernels.prefix_max_stats(rng.as_master(rng.trial_seed(seed, j)), 0, trials, r, out)
        est = float(out.mean())
        se = float(out.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        points.append(CurvePoint(float(r), est, se, ratio=est / math.sqrt(loglog(r))))
    return points


def expectation_check(m: int, delta: float, trials: int, seed: int) -> ExpectationCheck:
    """MC mean of sup_{sigma^2>=delta} |F_m-u|/(sigma(u) sqrt(delta)) vs 1 + 2/c1."""
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    if m < 1:
        raise InvalidInput("m must be >= 1")
    if not (delta >= 1.0 / m):
        raise InvalidInput(f"delta must be >= 1/m = {1.0 / m:g}")
    if not (delta <= 0.25):
        raise InvalidDelta("delta must be <= 1/4 (range empty otherwise)")
    stats = _sup_stat_batch("variance", m, delta, rng.trial_seed(seed, 0), 0, trials)
    mean_ratio = float(stats.mean()) / math.sqrt(delta)
    if not math.isfinite(mean_ratio):
        raise InvalidInput("mean ratio not finite")
    c1 = load_calibrated_constants().c1
    return ExpectationCheck(mean_ratio, 1.0 + 2.0 / c1)


def load_calibrated_constants() -> ConstantSet:
    """Persisted calibrated constants if present, else the documented defaults."""
    try:
        payload = json.loads(CALIBRATED_PATH.read_text())
        return ConstantSet(
            c0=float(payload["c0"]),
            c1=float(payload["c1"]),
            c2=float(payload["c2"]),
            source=str(payload.get("source", "persisted")),
        )
    except FileNotFoundError:
        return ConstantSet()


def save_calibrated_constants(consts: ConstantSet, path: Optional[Path] = None) -> Path:
    """Persist constants as the package's calibrated defaults."""
    target = Path(path) if path is not None else CALIBRATED_PATH
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(
        json.dumps(
            {"c0": consts.c0, "c1": consts.c1, "c2": consts.c2, "source": consts.source},
            indent=2,
        )
        + "\n"
    )
    return target


def set_worker_count(n: int) -> int:
    """Clamp the compiled-kernel thread count; never changes results."""
    import numba

    n_eff = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n_eff)
    return n_eff
