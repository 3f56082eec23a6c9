"""Domain types shared by the estimators.

Times are plain reals in whatever unit the caller chose (years, months, ...).
All types are frozen dataclasses; none of them validate on construction so
that :func:`validate` can report every problem at once.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

OVERLAP_TOL = 1e-9


class CoxTrendError(Exception):
    """Base class for estimation errors."""


class InvalidSeriesError(CoxTrendError, ValueError):
    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DegenerateDataError(CoxTrendError, ValueError):
    """No events at all, or too few intervals to estimate a trend."""


class BoundaryMLEError(CoxTrendError, ArithmeticError):
    """The likelihood maximum lies at beta = +/- infinity."""


class PriorMismatchError(CoxTrendError, ValueError):
    pass


class FitMode(str, enum.Enum):
    CLASSICAL_MLE = "CLASSICAL_MLE"
    BAYES_MAP = "BAYES_MAP"


class WeightMode(str, enum.Enum):
    AUGMENT = "AUGMENT"
    BLEND = "BLEND"


class IntervalKind(str, enum.Enum):
    CONFIDENCE = "CONFIDENCE"
    HPD_APPROX = "HPD_APPROX"


class Decision(str, enum.Enum):
    SIGNIFICANT_DECREASE = "SIGNIFICANT_DECREASE"
    SIGNIFICANT_INCREASE = "SIGNIFICANT_INCREASE"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class IntervalRecord:
    """One observation window: its center, its length and the event count."""

    center: float
    length: float
    count: float

    @property
    def start(self) -> float:
        return self.center - self.length / 2

    @property
    def end(self) -> float:
        return self.center + self.length / 2


@dataclass(frozen=True)
class ObservationSeries:
    intervals: tuple[IntervalRecord, ...]
    time_unit: str = "year"

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple(self.intervals))

    @classmethod
    def from_arrays(cls, centers, lengths, counts, time_unit: str = "year") -> ObservationSeries:
        centers = np.broadcast_to(np.asarray(centers, dtype=float), np.shape(counts))
        lengths = np.broadcast_to(np.asarray(lengths, dtype=float), np.shape(counts))
        records = tuple(
            IntervalRecord(float(c), float(t), _as_count(k)) for c, t, k in zip(centers, lengths, counts)
        )
        return cls(records, time_unit)

    @classmethod
    def from_bounds(cls, starts, ends, counts, time_unit: str = "year") -> ObservationSeries:
        starts = np.asarray(starts, dtype=float)
        ends = np.asarray(ends, dtype=float)
        return cls.from_arrays((starts + ends) / 2, ends - starts, counts, time_unit)

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def centers(self) -> np.ndarray:
        return np.array([r.center for r in self.intervals], dtype=float)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([r.length for r in self.intervals], dtype=float)

    @property
    def counts(self) -> np.ndarray:
        return np.array([r.count for r in self.intervals], dtype=float)

    @property
    def total_count(self) -> float:
        return float(sum(r.count for r in self.intervals))

    @property
    def window(self) -> tuple[float, float]:
        return (min(r.start for r in self.intervals), max(r.end for r in self.intervals))

    def with_counts(self, counts) -> ObservationSeries:
        records = tuple(replace(r, count=_as_count(k)) for r, k in zip(self.intervals, counts))
        return replace(self, intervals=records)


def _as_count(k):
    return int(k) if isinstance(k, (int, np.integer)) else float(k)


@dataclass(frozen=True)
class PriorEntry:
    tau: float
    a: float


@dataclass(frozen=True)
class PriorSpec:
    """Conjugate prior expressed as pseudo-counts ``a`` placed at times ``tau``.

    In BLEND mode every entry also needs a weight ``q`` in [0, 1] given to the
    observed count; the prior receives ``1 - q``.
    """

    entries: tuple[PriorEntry, ...]
    weight_mode: WeightMode = WeightMode.AUGMENT
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        object.__setattr__(self, "weight_mode", WeightMode(self.weight_mode))
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(float(q) for q in self.weights))

    @classmethod
    def pseudo_counts(cls, taus, a, weight_mode=WeightMode.AUGMENT, weights=None) -> PriorSpec:
        a = np.broadcast_to(np.asarray(a, dtype=float), np.shape(taus))
        entries = tuple(PriorEntry(float(t), float(x)) for t, x in zip(taus, a))
        return cls(entries, weight_mode, weights)

    @classmethod
    def flat(cls, series: ObservationSeries, a: float, **kwargs) -> PriorSpec:
        """Same pseudo-count at every interval center of ``series``."""
        return cls.pseudo_counts(series.centers, a, **kwargs)

    @property
    def taus(self) -> np.ndarray:
        return np.array([e.tau for e in self.entries], dtype=float)

    @property
    def a(self) -> np.ndarray:
        return np.array([e.a for e in self.entries], dtype=float)


@dataclass(frozen=True)
class FitResult:
    lambda0_hat: float
    beta_hat: float
    information: float
    sigma: float
    time_origin: float
    mode: FitMode = FitMode.CLASSICAL_MLE


@dataclass(frozen=True)
class IntervalEstimate:
    lower: float
    upper: float
    alpha: float
    estimate: float
    kind: IntervalKind = IntervalKind.CONFIDENCE

    @property
    def coverage(self) -> float:
        return 1.0 - 2.0 * self.alpha

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class TrendVerdict:
    """One-sided bounds on beta and the decision they imply.

    ``u_conf > 0`` means a significant decrease in event intensity,
    ``o_conf < 0`` a significant increase.
    """

    u_conf: float
    o_conf: float
    alpha: float
    decision: Decision = field(init=False)

    def __post_init__(self):
        if self.u_conf > 0:
            decision = Decision.SIGNIFICANT_DECREASE
        elif self.o_conf < 0:
            decision = Decision.SIGNIFICANT_INCREASE
        else:
            decision = Decision.INCONCLUSIVE
        object.__setattr__(self, "decision", decision)


def recenter(series: ObservationSeries, origin: float) -> ObservationSeries:
    """Shift every interval center by ``-origin``."""
    if origin == 0:
        return series
    records = tuple(replace(r, center=r.center - origin) for r in series.intervals)
    return replace(series, intervals=records)


def default_origin(series: ObservationSeries) -> float:
    """Midpoint of the whole observation window."""
    start, end = series.window
    return (start + end) / 2


def validate(series: ObservationSeries, require_integer_counts: bool = True) -> list[str]:
    """Return a list of human-readable invariant violations (empty if valid).

    Estimators call this with ``require_integer_counts=False`` because prior
    augmentation legitimately produces fractional counts.
    """
    violations = []
    if len(series.intervals) < 1:
        violations.append("series: at least one interval record is required (n >= 1)")
        return violations
    for i, rec in enumerate(series.intervals):
        if not (math.isfinite(rec.center)):
            violations.append(f"record {i}: center must be finite")
        if not (rec.length > 0 and math.isfinite(rec.length)):
            violations.append(f"record {i}: length > 0 violated (length={rec.length!r})")
        if not (math.isfinite(rec.count) and rec.count >= 0):
            violations.append(f"record {i}: count >= 0 violated (count={rec.count!r})")
        elif require_integer_counts and float(rec.count) != math.floor(rec.count):
            violations.append(f"record {i}: count must be an integer (count={rec.count!r})")
    for i in range(1, len(series.intervals)):
        prev, cur = series.intervals[i - 1], series.intervals[i]
        if not cur.center > prev.center:
            violations.append(
                f"record {i}: centers must be strictly increasing ({prev.center!r} then {cur.center!r})"
            )
        elif cur.center - prev.center < (prev.length + cur.length) / 2 - OVERLAP_TOL:
            violations.append(f"record {i}: intervals must not overlap (record {i - 1} ends after record {i} starts)")
    return violations


def check(series: ObservationSeries, require_integer_counts: bool = False) -> None:
    violations = validate(series, require_integer_counts)
    if violations:
        raise InvalidSeriesError(violations)
