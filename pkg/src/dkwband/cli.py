"""Command-line surface: band emission, experiment drivers, oracle checks.

Reports are CSV (header row; '#'-prefixed config echo) or JSON (config echo
plus rows); all reals serialize with 17 significant digits so re-parsing is
exact.  Exit codes: 0 success, 2 validation/usage error, 1 internal error.
The default master seed comes from the DKW_SEED environment variable (else 0).
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import __version__
from .bands import (
    BandSpec,
    ConstantSet,
    classical_band,
    data_band,
    delta_for_confidence,
    full_range_width,
    shifted_width,
    variance_width,
)
from .binom_oracle import TailQuery, bennett_bound, deviation_prob, fixed_t_lower_check, no_cancel_check
from .ecdf import DistributionModel, SortedSample, build_sample
from .errors import DkwbandError, EmptySample, InvalidInput, IoError, ParseError
from .experiments import (
    calibrate_constants,
    coverage_experiment,
    lil_curve,
    save_calibrated_constants,
    set_worker_count,
    zm_curve,
)
from .rademacher import BlockConfig, block_event_prob

COMMANDS = ("band", "envelope", "coverage", "calibrate", "zm", "lil", "oracle", "blocks")
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation, fully determining its report."""

    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    format: str = "csv"
    seed: int = 0
    trials: int = 0
    threads: int = 1
    options: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InvalidInput(f"command must be one of {COMMANDS}")
        if self.format not in FORMATS:
            raise InvalidInput(f"format must be one of {FORMATS}")


def parse_sample_file(path: str) -> SortedSample:
    """One numeric value per line; blank lines and '#' comments skipped."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    values = []
    for lineno, line in enumerate(lines, start=1):
        token = line.strip()
        if not token or token.startswith("#"):
            continue
        try:
            values.append(float(token))
        except ValueError as exc:
            raise ParseError(f"not a number: {token!r}", line=lineno) from exc
    if not values:
        raise EmptySample(f"no values in {path}")
    return build_sample(values)


def parse_model(text: str) -> DistributionModel:
    """'uniform01', 'exponential:RATE' or 'normal:MEAN,SD'."""
    name, _, rest = text.partition(":")
    if name == "uniform01":
        return DistributionModel.uniform01()
    if name == "exponential":
        return DistributionModel.exponential(float(rest))
    if name == "normal":
        mean, _, sd = rest.partition(",")
        return DistributionModel.normal(float(mean), float(sd))
    raise InvalidInput(f"unknown model {text!r}")


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.17g" % x
    return str(x)


def _emit(cfg: RunConfig, columns: list[str], rows: list[tuple]) -> str:
    """Serialize rows + config echo in the requested format."""
    echo = {
        "command": cfg.command,
        "input_path": cfg.input_path,
        "output_path": cfg.output_path,
        "format": cfg.format,
        "seed": cfg.seed,
        "trials": cfg.trials,
        # threads deliberately omitted: worker count never changes results,
        # and reports must be identical across --threads values
        "options": dict(sorted(cfg.options.items())),
        "version": __version__,
    }
    if cfg.format == "json":
        payload = {
            "config": echo,
            "columns": columns,
            "rows": [list(r) for r in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(echo, sort_keys=True) + "\n")
    buf.write(",".join(columns) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(x) for x in r) + "\n")
    return buf.getvalue()


def _consts_from(options: dict) -> ConstantSet:
    kw = {}
    for name in ("c0", "c1", "c2"):
        if options.get(name) is not None:
            kw[name] = float(options[name])
    if kw:
        kw["source"] = "cli-override"
        return ConstantSet(**kw)
    from .experiments import load_calibrated_constants

    return load_calibrated_constants()


def _band_delta(cfg: RunConfig, m: int, consts: ConstantSet) -> float:
    opts = cfg.options
    if opts.get("delta") is not None:
        return float(opts["delta"])
    if opts.get("failure_prob") is not None:
        return delta_for_confidence(m, float(opts["failure_prob"]), consts).delta
    raise InvalidInput("need --delta or --failure-prob")


def _run_band(cfg: RunConfig):
    if not cfg.input_path:
        raise InvalidInput("band needs --input")
    sample = parse_sample_file(cfg.input_path)
    consts = _consts_from(cfg.options)
    delta = _band_delta(cfg, sample.m, consts)
    spec = BandSpec(cfg.options.get("kind", "classical"), sample.m, delta, consts)
    model = parse_model(cfg.options["model"]) if cfg.options.get("model") else None
    rows = [(r.t, r.side, r.lo, r.hi) for r in data_band(sample, spec, model)]
    return ["t", "side", "lo", "hi"], rows


def _run_envelope(cfg: RunConfig):
    opts = cfg.options
    kind = opts.get("kind", "classical")
    m = int(opts["m"])
    consts = _consts_from(opts)
    delta = _band_delta(cfg, m, consts)
    npoints = int(opts.get("points", 512))
    if npoints < 2:
        raise InvalidInput("need at least 2 grid points")
    BandSpec(kind, m, delta, consts)
    us = np.linspace(0.0, 1.0, npoints + 2)[1:-1]  # open interval
    rows = []
    for u in us:
        u = float(u)
        if kind == "classical":
            w, regime = classical_band(delta, m).halfwidth, "uniform"
        elif kind == "shifted":
            w, regime = shifted_width(u, delta), "all"
        elif kind == "full_range":
            w, regime = full_range_width(u, delta, m, consts)
        else:
            try:
                w = variance_width(u, delta, kind)
            except DkwbandError:
                continue  # outside the validity range of this width
            regime = "core"
        rows.append((u, w, regime))
    return ["u", "width", "regime"], rows


def _run_coverage(cfg: RunConfig):
    opts = cfg.options
    model = parse_model(opts.get("model", "uniform01"))
    consts = _consts_from(opts) if any(opts.get(c) is not None for c in ("c0", "c1", "c2")) else None
    rep = coverage_experiment(
        opts.get("kind", "classical"),
        int(opts["m"]),
        float(opts["delta"]),
        model,
        cfg.trials,
        cfg.seed,
        consts,
    )
    cols = [
        "band_kind", "m", "delta", "trials", "violations",
        "rate", "wilson_lo", "wilson_hi", "master_seed",
    ]
    return cols, [tuple(getattr(rep, c) for c in cols)]


def _run_calibrate(cfg: RunConfig):
    opts = cfg.options
    res = calibrate_constants(
        opts.get("kind", "variance"),
        [int(x) for x in opts["m_grid"]],
        seed=cfg.seed,
        trials_per_cell=cfg.trials if cfg.trials else 10**4,
    )
    if opts.get("save"):
        save_calibrated_constants(res.consts, None if opts["save"] is True else opts["save"])
    cols = ["c0", "c1", "c2", "source", "target_family", "m", "delta", "achieved", "seed"]
    rows = [
        (res.consts.c0, res.consts.c1, res.consts.c2, res.consts.source,
         res.target_family, m, d, ok, res.seed)
        for (m, d), ok in zip(res.grid, res.achieved)
    ]
    return cols, rows


def _run_zm(cfg: RunConfig):
    pts = zm_curve(
        [int(x) for x in cfg.options["m_grid"]],
        cfg.options.get("rule", "fixed_over_m:4"),
        cfg.trials,
        cfg.seed,
    )
    return ["m", "estimate", "std_error"], [(p.x, p.estimate, p.std_error) for p in pts]


def _run_lil(cfg: RunConfig):
    pts = lil_curve([int(x) for x in cfg.options["r_grid"]], cfg.trials, cfg.seed)
    return ["r", "estimate", "std_error", "ratio"], [
        (p.x, p.estimate, p.std_error, p.ratio) for p in pts
    ]


def _run_oracle(cfg: RunConfig):
    opts = cfg.options
    check = opts["check"]
    m = int(opts["m"])
    p = float(opts["p"])
    consts = ConstantSet(
        c0=float(opts.get("c0") or 4.0),
        c1=float(opts.get("c1") or 1.0),
        c2=float(opts.get("c2") or 1.0),
        source="cli",
    )
    if check == "bennett":
        eps = float(opts["eps"])
        exact = deviation_prob(TailQuery(m, p, eps, "two_sided"))
        bound = min(1.0, bennett_bound(m, p, eps))
        row = (exact, bound, "bennett", exact <= bound)
    else:
        delta = float(opts["delta"])
        if check == "prop14":
            res = fixed_t_lower_check(m, p, delta, consts)
        elif check == "thm51":
            res = no_cancel_check(m, p, delta, consts, "upper_thm51")
        elif check == "prop52":
            res = no_cancel_check(m, p, delta, consts, "lower_prop52")
        else:
            raise InvalidInput(f"unknown check {check!r}")
        row = (res.exact_prob, res.bound_value, res.regime, res.satisfied)
    return ["exact_prob", "bound_value", "regime", "satisfied"], [row]


def _run_blocks(cfg: RunConfig):
    opts = cfg.options
    mode = opts.get("mode", "exact")
    s = int(opts.get("s", 4))
    rows = []
    for xi in opts["xi_list"]:
        for eta in opts["eta_list"]:
            bc = BlockConfig(int(xi), int(eta), 2)
            res = block_event_prob(bc, s, mode, cfg.trials, cfg.seed)
            rows.append(
                (int(xi), int(eta), s, res.estimate, res.std_error, res.mode, res.trials, res.seed)
            )
    return ["xi", "eta", "s", "estimate", "std_error", "mode", "trials", "seed"], rows


_RUNNERS = {
    "band": _run_band,
    "envelope": _run_envelope,
    "coverage": _run_coverage,
    "calibrate": _run_calibrate,
    "zm": _run_zm,
    "lil": _run_lil,
    "oracle": _run_oracle,
    "blocks": _run_blocks,
}


def run_command(cfg: RunConfig) -> tuple[int, str]:
    """Execute one config; returns (exit_code, serialized report)."""
    set_worker_count(cfg.threads)
    columns, rows = _RUNNERS[cfg.command](cfg)
    return 0, _emit(cfg, columns, rows)


def _build_parser() -> argparse.ArgumentParser:
    default_seed = int(os.environ.get("DKW_SEED", "0"))
    top = argparse.ArgumentParser(
        prog="dkwband",
        description="Variance-adaptive confidence bands for empirical CDFs",
    )
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, trials_default=0):
        p.add_argument("--format", choices=FORMATS, default="csv")
        p.add_argument("--output", default=None, help="write report here instead of stdout")
        p.add_argument("--seed", type=int, default=default_seed,
                       help="master seed (default: DKW_SEED env or 0)")
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap for compiled kernels; never changes results")

    def band_flags(p, with_kind=True):
        if with_kind:
            p.add_argument("--kind", default="classical",
                           choices=("classical", "variance", "minform", "shifted", "full_range"))
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--failure-prob", type=float, default=None, dest="failure_prob")
        p.add_argument("--c0", type=float, default=None)
        p.add_argument("--c1", type=float, default=None)
        p.add_argument("--c2", type=float, default=None)

    p = sub.add_parser("band", help="data band rows at every order statistic")
    common(p)
    p.add_argument("--input", required=True)
    band_flags(p)
    p.add_argument("--model", default=None,
                   help="evaluate widths at u = F(t): uniform01 | exponential:RATE | normal:MEAN,SD")

    p = sub.add_parser("envelope", help="width table over a u-grid")
    common(p)
    band_flags(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--points", type=int, default=512)

    p = sub.add_parser("coverage", help="Monte Carlo band violation rate")
    common(p, trials_default=10**4)
    p.add_argument("--kind", default="classical",
                   choices=("classical", "variance", "minform", "shifted"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--model", default="uniform01")
    p.add_argument("--c0", type=float, default=None)
    p.add_argument("--c1", type=float, default=None)
    p.add_argument("--c2", type=float, default=None)

    p = sub.add_parser("calibrate", help="sweep for workable (c0, c1)")
    common(p, trials_default=10**4)
    p.add_argument("--kind", default="variance",
                   choices=("classical", "variance", "minform", "shifted"))
    p.add_argument("--m-grid", required=True, dest="m_grid",
                   help="comma-separated sample sizes, e.g. 1000,10000")
    p.add_argument("--save", nargs="?", const=True, default=None,
                   help="persist result as the package default constants")

    p = sub.add_parser("zm", help="normalized sup statistic curve over m")
    common(p, trials_default=2000)
    p.add_argument("--m-grid", required=True, dest="m_grid")
    p.add_argument("--rule", default="fixed_over_m:4",
                   help="fixed_over_m:C (delta=C/m) or loglog_rule:C (delta=C*loglog(m)/m)")

    p = sub.add_parser("lil", help="prefix-maximum growth curve over r")
    common(p, trials_default=4000)
    p.add_argument("--r-grid", required=True, dest="r_grid")

    p = sub.add_parser("oracle", help="exact binomial regime checks")
    common(p)
    p.add_argument("--check", required=True, choices=("prop14", "thm51", "prop52", "bennett"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--c1", type=float, default=None)
    p.add_argument("--c2", type=float, default=None)

    p = sub.add_parser("blocks", help="block event probability surface over (xi, eta)")
    common(p, trials_default=2000)
    p.add_argument("--xi-list", default="2", dest="xi_list")
    p.add_argument("--eta-list", default="1,2", dest="eta_list")
    p.add_argument("--s", type=int, default=4)
    p.add_argument("--mode", choices=("exact", "mc"), default="exact")

    return top


_COMMON_KEYS = {"command", "format", "output", "seed", "trials", "threads"}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    ns = vars(args)
    options = {}
    for key, val in ns.items():
        if key in _COMMON_KEYS or val is None:
            continue
        if key in ("m_grid", "r_grid", "xi_list", "eta_list") and isinstance(val, str):
            val = [int(x) for x in val.split(",") if x]
        options[key] = val
    return RunConfig(
        command=ns["command"],
        input_path=options.pop("input", None),
        output_path=ns.get("output"),
        format=ns.get("format", "csv"),
        seed=ns.get("seed", 0),
        trials=ns.get("trials", 0),
        threads=ns.get("threads", 1),
        options=options,
    )


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        code, payload = run_command(cfg)
    except DkwbandError as exc:
        print(f"dkwband {args.command}: {exc}", file=sys.stderr)
        print(f"(run 'dkwband {args.command} --help' for usage)", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - internal failure path
        print(f"dkwband: internal error: {exc!r}", file=sys.stderr)
        return 1
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
