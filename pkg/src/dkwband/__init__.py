"""Variance-adaptive confidence bands for empirical distribution functions.

The package has three layers:

* exact finite-sample machinery — empirical CDF sup statistics over
  arbitrary weight profiles (:mod:`dkwband.ecdf`), band width formulas with
  their validity ranges (:mod:`dkwband.bands`), and exact binomial /
  sign-enumeration oracles (:mod:`dkwband.binom_oracle`,
  :mod:`dkwband.rademacher`);
* reproducible Monte Carlo drivers that measure violation rates, calibrate
  workable constants and trace growth curves (:mod:`dkwband.experiments`);
* a CLI (:mod:`dkwband.cli`) that serializes all of the above as CSV/JSON
  reports with full config echo.

All randomness flows from a single integer master seed through counter-mode
streams, so every report is reproducible byte-for-byte regardless of worker
count.
"""

__version__ = "0.1.0"

from .bands import (
    BAND_KINDS,
    BandRow,
    BandSpec,
    ClassicalBand,
    ConstantSet,
    DeltaChoice,
    FullRangeWidth,
    classical_band,
    data_band,
    delta_for_confidence,
    full_range_width,
    loglog,
    shifted_width,
    variance_width,
)
from .binom_oracle import (
    RegimeCheckResult,
    TailQuery,
    bennett_bound,
    binom_log_pmf,
    deviation_prob,
    fixed_t_lower_check,
    gaussian_tail_lower,
    no_cancel_check,
    petrov_lower,
)
from .ecdf import (
    DeviationResult,
    DistributionModel,
    IsomorphicCheck,
    SortedSample,
    build_sample,
    ecdf_eval,
    isomorphic_violation,
    pit_transform,
    range_bounds,
    sup_deviation,
    weighted_sup,
)
from .errors import (
    CalibrationFailed,
    DeltaInfeasible,
    DeltaMTooSmall,
    DkwbandError,
    EmptySample,
    ExactInfeasible,
    InvalidDelta,
    InvalidInput,
    InvalidValue,
    IoError,
    OutOfRange,
    ParseError,
    ValidationError,
)
from .experiments import (
    CalibrationResult,
    CoverageReport,
    CurvePoint,
    ExpectationCheck,
    calibrate_constants,
    coverage_experiment,
    expectation_check,
    lil_curve,
    load_calibrated_constants,
    save_calibrated_constants,
    set_worker_count,
    wilson_interval,
    zm_curve,
)
from .rademacher import (
    BlockConfig,
    LevyCheck,
    MaxStatResult,
    block_event_prob,
    expected_max,
    levy_symmetrization_check,
    max_norm_prefix,
    ms_bound,
    weighted_exceed_prob,
)

__all__ = [
    "__version__",
    # bands
    "BAND_KINDS", "BandRow", "BandSpec", "ClassicalBand", "ConstantSet",
    "DeltaChoice", "FullRangeWidth", "classical_band", "data_band",
    "delta_for_confidence", "full_range_width", "loglog", "shifted_width",
    "variance_width",
    # binomial oracle
    "RegimeCheckResult", "TailQuery", "bennett_bound", "binom_log_pmf",
    "deviation_prob", "fixed_t_lower_check", "gaussian_tail_lower",
    "no_cancel_check", "petrov_lower",
    # ecdf
    "DeviationResult", "DistributionModel", "IsomorphicCheck", "SortedSample",
    "build_sample", "ecdf_eval", "isomorphic_violation", "pit_transform",
    "range_bounds", "sup_deviation", "weighted_sup",
    # errors
    "CalibrationFailed", "DeltaInfeasible", "DeltaMTooSmall", "DkwbandError",
    "EmptySample", "ExactInfeasible", "InvalidDelta", "InvalidInput",
    "InvalidValue", "IoError", "OutOfRange", "ParseError", "ValidationError",
    # experiments
    "CalibrationResult", "CoverageReport", "CurvePoint", "ExpectationCheck",
    "calibrate_constants", "coverage_experiment", "expectation_check",
    "lil_curve", "load_calibrated_constants", "save_calibrated_constants",
    "set_worker_count", "wilson_interval", "zm_curve",
    # rademacher
    "BlockConfig", "LevyCheck", "MaxStatResult", "block_event_prob",
    "expected_max", "levy_symmetrization_check", "max_norm_prefix",
    "ms_bound", "weighted_exceed_prob",
]
