"""End-to-end verification of the package's advertised guarantees.

One test per numbered guarantee; each line of ``pytest -v`` output for this
file is a pass/fail verdict for the corresponding claim.  Tolerances and
grids match the documented targets; nothing here is tuned to the RNG.
"""

import math
import time

import numpy as np
import pytest

from _oracle import dense_grid_sup
from dkwband.bands import ConstantSet
from dkwband.binom_oracle import (
    TailQuery,
    bennett_bound,
    deviation_prob,
    fixed_t_lower_check,
    no_cancel_check,
)
from dkwband.cli import RunConfig, run_command
from dkwband.ecdf import (
    DistributionModel,
    build_sample,
    pit_transform,
    sup_deviation,
    weighted_sup,
)
from dkwband.experiments import (
    coverage_experiment,
    lil_curve,
    load_calibrated_constants,
    zm_curve,
)
from dkwband.rademacher import expected_max, levy_symmetrization_check

UNI = DistributionModel.uniform01()
SWEEP = (0.25, 0.5, 1.0, 2.0, 4.0)


def test_criterion_01():
    """Classical band: violation rate at most 2exp(-2*delta*m) (m=1000)."""
    t0 = time.perf_counter()
    rep = coverage_experiment("classical", 1000, 0.005, UNI, 10**5, 1)
    elapsed = time.perf_counter() - t0
    budget = 9.08e-5 + 3.0 * math.sqrt(9.08e-5 / 10**5)
    assert rep.rate <= budget, f"rate {rep.rate} exceeds {budget}"
    assert elapsed < 60.0, f"took {elapsed:.1f}s"


def test_criterion_02(full_calibration):
    """Variance-band calibration succeeds on m in {1e3,1e4,1e5} at 1e5 trials."""
    res = full_calibration
    assert len(res.grid) == 3
    assert all(res.achieved), f"unmet cells in {res.grid}"
    assert res.consts.c0 > 0 and res.consts.c1 > 0
    persisted = load_calibrated_constants()
    assert (persisted.c0, persisted.c1, persisted.c2) == (
        res.consts.c0, res.consts.c1, res.consts.c2,
    ), "persisted constants do not reproduce"


def test_criterion_03(rng_np):
    """Sup statistics computed through a model match the uniform-PIT path bitwise."""
    for model in (DistributionModel.exponential(0.7), DistributionModel.normal(2.0, 3.0)):
        for _ in range(50):
            m = int(rng_np.integers(5, 60))
            x = model.quantile(rng_np.uniform(0.001, 0.999, size=m))
            s = build_sample(x)
            su = pit_transform(s, model)
            plain = sup_deviation(s, model)
            plain_u = sup_deviation(su, UNI)
            assert plain.value == plain_u.value and plain.arg_u == plain_u.arg_u
            a = weighted_sup(s, model, 0.04, "variance", "sigma2_ge_delta")
            b = weighted_sup(su, UNI, 0.04, "variance", "sigma2_ge_delta")
            assert (a.value, a.arg_u, a.side) == (b.value, b.arg_u, b.side)


def test_criterion_04(rng_np):
    """weighted_sup agrees with a 1e6-point dense-grid oracle to 1e-6."""
    pairs = (
        ("variance", "sigma2_ge_delta"),
        ("zm", "f_in_2delta_half"),
        ("minform", "min_ge_delta"),
    )
    for i in range(100):
        mode, range_mode = pairs[i % 3]
        m = int(rng_np.integers(1, 51))
        delta = float(rng_np.uniform(0.01, 0.24))
        s = build_sample(rng_np.uniform(0.001, 0.999, size=m))
        got = weighted_sup(s, UNI, delta, mode, range_mode).value
        want = dense_grid_sup(s.values, delta, mode, range_mode)
        assert abs(got - want) <= 1e-6, (i, mode, m, delta, got, want)


def test_criterion_05():
    """Sign-sum enumeration: closed forms, 1e6-trial MC, symmetrization bound."""
    closed = {1: 1.0, 2: (math.sqrt(2.0) + 1.0) / 2.0, 3: (math.sqrt(3.0) + math.sqrt(2.0)) / 4.0 + 0.5}
    for r, want in closed.items():
        assert abs(expected_max(r, "exact").estimate - want) < 1e-14
    for r in range(1, 17):
        exact = expected_max(r, "exact").estimate
        mc = expected_max(r, "mc", trials=10**6, seed=101 + r)
        assert abs(mc.estimate - exact) <= 3.0 * mc.std_error + 1e-12, (r, mc.estimate, exact)
    for n in range(1, 17):
        chk = levy_symmetrization_check(n)
        assert chk.lhs <= chk.rhs, (n, chk)


def test_criterion_06():
    """Prefix-maximum growth tracks sqrt(lnln r) over r = 2^8..2^22."""
    t0 = time.perf_counter()
    grid = [2**k for k in range(8, 23, 2)]
    pts = lil_curve(grid, 4000, 11)
    elapsed = time.perf_counter() - t0
    est = np.array([p.estimate for p in pts])
    assert np.all(np.diff(est) > 0.0), f"not increasing: {est}"
    target = np.sqrt(np.log(np.log(np.array(grid, dtype=float))))
    pearson = float(np.corrcoef(est, target)[0, 1])
    assert pearson >= 0.95, f"correlation {pearson}"
    ratios = [p.ratio for p in pts]
    assert min(ratios) > 0.0
    print(f"calibrated growth constant c = {min(ratios):.6f} (pearson {pearson:.4f})")
    assert elapsed < 600.0, f"took {elapsed:.1f}s"


def test_criterion_07():
    """Two-sided exact lower bound holds at some swept c1 on the whole grid."""
    t0 = time.perf_counter()
    cells = []
    for m in (100, 1000):
        for k in (8, 32, 128):
            delta = k / m
            if delta > 0.25:
                continue
            for p in (0.1, 0.25, 0.5):
                if p * (1.0 - p) >= delta:
                    cells.append((m, p, delta))
    assert len(cells) == 11
    admissible = []
    for c1 in SWEEP:
        consts = ConstantSet(4.0, c1, 0.5, "probe")
        if all(fixed_t_lower_check(m, p, d, consts).satisfied for m, p, d in cells):
            admissible.append(c1)
    assert admissible, "no c1 in the sweep works on every cell"
    print(f"fixed-t lower bound: admissible c1 = {admissible}")
    assert time.perf_counter() - t0 < 10.0


def test_criterion_08():
    """Small-variance regimes: both tail directions satisfiable; Bennett dominates."""
    m, delta = 10**4, 0.01
    p_log = (1e-40, 1e-20, 1e-10, 1e-5, 1e-3)
    p_tiny = (1e-60, 1e-55, 1e-52, 1e-50, 3e-49)
    probe = ConstantSet(4.0, 1.0, 1.0, "probe")
    for p in p_log:
        assert no_cancel_check(m, p, delta, probe, "upper_thm51").regime == "log"
    for p in p_tiny:
        assert no_cancel_check(m, p, delta, probe, "upper_thm51").regime == "tiny"
    found = {}
    for direction in ("upper_thm51", "lower_prop52"):
        pairs = [
            (c1, c2)
            for c1 in SWEEP
            for c2 in SWEEP
            if all(
                no_cancel_check(m, p, delta, ConstantSet(4.0, c1, c2, "probe"), direction).satisfied
                for p in p_log + p_tiny
            )
        ]
        assert pairs, f"no (c1, c2) satisfies {direction} on all ten points"
        found[direction] = pairs
    print(f"satisfiable constants: {found}")
    for mm in (10, 100, 1000):
        for p in (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5):
            for eps in (0.01, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5):
                exact = deviation_prob(TailQuery(mm, p, eps, "two_sided"))
                assert exact <= min(1.0, bennett_bound(mm, p, eps)) + 1e-15


def test_criterion_09(full_calibration):
    """Normalized sup grows with m at delta = 4/m; flat under the loglog rule."""
    grid = [2**10, 2**14, 2**18]
    pts = zm_curve(grid, ("fixed_over_m", 4.0), 2000, 5)
    est = [p.estimate for p in pts]
    ses = [p.std_error for p in pts]
    growing = all(
        est[i + 1] - est[i] > math.hypot(ses[i], ses[i + 1]) for i in range(len(est) - 1)
    )
    target = [math.sqrt(math.log(math.log(m))) for m in grid]
    pearson = float(np.corrcoef(est, target)[0, 1])
    assert growing or pearson >= 0.9, (est, ses, pearson)
    c0 = full_calibration.consts.c0
    flat = [p.estimate for p in zm_curve(grid, ("loglog_rule", c0), 2000, 5)]
    assert max(flat) / min(flat) <= 2.0, flat


def test_criterion_10():
    """Reports are byte-identical for any --threads value."""
    runs = (
        ("coverage", {"kind": "variance", "m": 500, "delta": 0.05, "model": "uniform01"}, 2000, "csv"),
        ("zm", {"m_grid": [256, 1024], "rule": "fixed_over_m:4"}, 300, "json"),
        ("lil", {"r_grid": [64, 256]}, 500, "csv"),
        ("blocks", {"xi_list": [2], "eta_list": [1, 2], "s": 4, "mode": "mc"}, 400, "json"),
    )
    for command, options, trials, fmt in runs:
        payloads = {
            run_command(
                RunConfig(command=command, format=fmt, seed=3, trials=trials,
                          threads=k, options=dict(options))
            )[1]
            for k in (1, 2, 4)
        }
        assert len(payloads) == 1, f"{command} report depends on thread count"
