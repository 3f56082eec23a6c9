"""Command-line front end.

Exit codes: 0 success (including inconclusive verdicts), 2 bad input,
3 data that admit no finite estimate.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .bayes import fit_map, hpd_interval
from .estimate import confidence_interval, fit_mle, fitted_curve, trend_test
from .ingest import InputError, read_prior, read_series
from .model import (
    BoundaryMLEError,
    DegenerateDataError,
    FitResult,
    IntervalEstimate,
    InvalidSeriesError,
    PriorMismatchError,
    TrendVerdict,
    default_origin,
)
from .simcheck import SimulationPlan, coverage_experiment, prior_corruption_demo
from .twosample import TwoSampleInput, cell_means, two_sample_bayes, two_sample_fit

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3


@dataclass
class AnalysisReport:
    input: dict
    fit: dict
    interval: dict
    verdict: dict
    fitted_curve: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> AnalysisReport:
        return cls(**json.loads(text))


def _fit_fields(fit: FitResult) -> dict:
    return {
        "mode": fit.mode.value,
        "lambda0_hat": fit.lambda0_hat,
        "beta_hat": fit.beta_hat,
        "information": fit.information,
        "sigma": fit.sigma,
        "time_origin": fit.time_origin,
    }


def _interval_fields(ci: IntervalEstimate) -> dict:
    return {"lower": ci.lower, "upper": ci.upper, "alpha": ci.alpha, "coverage": ci.coverage, "kind": ci.kind.value}


def _verdict_fields(v: TrendVerdict) -> dict:
    return {"decision": v.decision.value, "u_conf": v.u_conf, "o_conf": v.o_conf}


def flatten(obj, prefix: str = "") -> list[tuple[str, object]]:
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj):
            items.extend(flatten(obj[key], f"{prefix}.{key}" if prefix else key))
        return items
    if isinstance(obj, list):
        items = []
        for i, value in enumerate(obj):
            items.extend(flatten(value, f"{prefix}[{i}]"))
        return items
    return [(prefix, obj)]


def render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2)
    rows = flatten(doc)
    width = max(len(k) for k, _ in rows)
    lines = []
    for key, value in rows:
        if isinstance(value, float):
            value = repr(value)
        lines.append(f"{key:<{width}}  {value}")
    return "\n".join(lines)


def parse_origin(text: str):
    if text == "midpoint":
        return "midpoint"
    if text == "zero":
        return 0.0
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError("origin must be 'midpoint', 'zero' or a number") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError("origin must be finite")
    return value


def run_fit(args) -> int:
    series = read_series(args.data)
    origin = default_origin(series) if args.origin == "midpoint" else args.origin
    if args.prior:
        prior = read_prior(args.prior, mode=args.prior_mode)
        fit = fit_map(series, prior, origin=origin)
        interval = hpd_interval(fit, args.alpha)
    else:
        fit = fit_mle(series, origin=origin)
        interval = confidence_interval(fit, args.alpha)
    verdict = trend_test(fit, args.alpha)
    curve = fitted_curve(fit, series)
    start, end = series.window
    report = AnalysisReport(
        input={
            "source": str(args.data),
            "n": len(series),
            "total_count": series.total_count,
            "window_start": start,
            "window_end": end,
            "time_unit": series.time_unit,
        },
        fit=_fit_fields(fit),
        interval=_interval_fields(interval),
        verdict=_verdict_fields(verdict),
        fitted_curve=[
            {"center": c, "observed": float(k), "fitted": e}
            for (c, e), k in zip(curve, series.counts)
        ],
        config={
            "alpha": args.alpha,
            "origin": args.origin if isinstance(args.origin, str) else float(args.origin),
            "prior": str(args.prior) if args.prior else None,
            "prior_mode": args.prior_mode if args.prior else None,
        },
    )
    print(render(report.to_dict(), args.out))
    if args.plot:
        with open(args.plot, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["center", "observed", "fitted"])
            for row in report.fitted_curve:
                writer.writerow([repr(row["center"]), repr(row["observed"]), repr(row["fitted"])])
    return EXIT_OK


def _two_sample_block(fit: FitResult, alpha: float, cells) -> dict:
    ci = confidence_interval(fit, alpha)
    block = _fit_fields(fit)
    block.update(lower=ci.lower, upper=ci.upper, cell_means=list(cells))
    block.update(_verdict_fields(trend_test(fit, alpha)))
    return block


def run_two_sample(args) -> int:
    data = TwoSampleInput(args.k1, args.k2, args.total_time, args.split)
    doc = {
        "input": {"k1": args.k1, "k2": args.k2, "total_time": args.total_time, "split": args.split},
        "alpha": args.alpha,
        "classical": _two_sample_block(two_sample_fit(data), args.alpha, cell_means(data)),
        "version": __version__,
    }
    if args.a1 is not None or args.a2 is not None:
        a1, a2 = args.a1 or 0.0, args.a2 or 0.0
        bayes = two_sample_bayes(data, a1, a2)
        block = _two_sample_block(bayes, args.alpha, cell_means(data, a1, a2))
        block["kind"] = "HPD_APPROX"
        doc["bayes"] = block
        doc["input"].update(a1=a1, a2=a2)
    print(render(doc, args.out))
    return EXIT_OK


def run_coverage(args) -> int:
    plan = SimulationPlan.uniform_layout(
        args.intervals,
        args.interval_length,
        true_lambda0=args.lambda0,
        true_beta=args.beta,
        replications=args.reps,
        alpha=args.alpha,
        seed=args.seed,
    )
    report = coverage_experiment(plan, workers=args.workers)
    doc = report.to_dict()
    doc["version"] = __version__
    print(render(doc, args.out))
    return EXIT_OK


def run_prior_demo(args) -> int:
    doc = prior_corruption_demo(seed=args.seed)
    doc["version"] = __version__
    print(render(doc, args.out))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coxtrend", description="Trend analysis of rare-event counts.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit the trend model to a count series")
    p.add_argument("data", type=Path)
    p.add_argument("--alpha", type=float, default=0.05, help="tail probability per side (default 0.05)")
    p.add_argument("--origin", type=parse_origin, default="midpoint", help="midpoint, zero or a number")
    p.add_argument("--prior", type=Path, help="prior file with columns center,a[,q]")
    p.add_argument("--prior-mode", choices=["augment", "blend"], default="augment")
    p.add_argument("--out", choices=["text", "json"], default="text")
    p.add_argument("--plot", type=Path, help="write center,observed,fitted rows here")
    p.set_defaults(func=run_fit)

    p = sub.add_parser("two-sample", help="compare two adjacent periods")
    p.add_argument("--k1", type=float, required=True)
    p.add_argument("--k2", type=float, required=True)
    p.add_argument("--total-time", type=float, default=10.0)
    p.add_argument("--split", type=float, default=0.5)
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", choices=["text", "json"], default="text")
    p.set_defaults(func=run_two_sample)

    p = sub.add_parser("coverage", help="Monte Carlo coverage check")
    p.add_argument("--lambda0", type=float, default=5.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--intervals", type=int, default=10)
    p.add_argument("--interval-length", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", choices=["text", "json"], default="text")
    p.set_defaults(func=run_coverage)

    p = sub.add_parser("prior-demo", help="seeded case where a flat prior overturns the classical verdict")
    p.add_argument("--seed", type=int, default=2020)
    p.add_argument("--out", choices=["text", "json"], default="json")
    p.set_defaults(func=run_prior_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, InvalidSeriesError, PriorMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (DegenerateDataError, BoundaryMLEError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
