"""Before/after comparison of two adjacent periods.

The window ``[0, T]`` is split at ``split * T``. With equal halves the
score equation has the closed form ``beta = (2/T) * ln(k1/k2)``; other
splits go through the general solver. Times are measured from the window
midpoint unless another origin is requested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .estimate import DEFAULT_SETTINGS, SolverSettings, fisher_info, fit_mle
from .model import BoundaryMLEError, DegenerateDataError, FitMode, FitResult, ObservationSeries


@dataclass(frozen=True)
class TwoSampleInput:
    k1: float
    k2: float
    total_T: float
    split: float = 0.5

    def __post_init__(self):
        if not self.total_T > 0:
            raise ValueError("total_T must be positive")
        if not 0 < self.split < 1:
            raise ValueError("split must lie strictly between 0 and 1")
        if self.k1 < 0 or self.k2 < 0:
            raise ValueError("counts must be nonnegative")

    @property
    def k(self) -> float:
        return self.k1 + self.k2

    @property
    def lengths(self) -> tuple[float, float]:
        return (self.split * self.total_T, (1.0 - self.split) * self.total_T)

    def series(self) -> ObservationSeries:
        """Equivalent two-record series on the uncentered time axis [0, T]."""
        T1, T2 = self.lengths
        return ObservationSeries.from_arrays([T1 / 2, T1 + T2 / 2], [T1, T2], [self.k1, self.k2])


def _check_counts(k1: float, k2: float) -> None:
    if k1 + k2 <= 0:
        raise DegenerateDataError("no events in either period (k1 + k2 = 0)")
    if k1 == 0 or k2 == 0:
        raise BoundaryMLEError("one period has no events; beta-hat is infinite")


def two_sample_fit(
    data: TwoSampleInput,
    settings: SolverSettings = DEFAULT_SETTINGS,
    origin: float | None = None,
) -> FitResult:
    _check_counts(data.k1, data.k2)
    series = data.series()
    if origin is None:
        origin = data.total_T / 2
    if data.split != 0.5:
        return fit_mle(series, settings, origin)

    T = data.total_T
    # With z = (k1 + 3 k2)/k, beta = -(2/T) ln((z-1)/(3-z)) = (2/T) ln(k1/k2).
    # The difference of logs keeps beta exactly antisymmetric under k1 <-> k2.
    beta = 2.0 / T * (math.log(data.k1) - math.log(data.k2))
    t1, t2 = T / 4 - origin, 3 * T / 4 - origin
    lambda0 = data.k / (T / 2 * (math.exp(-beta * t1) + math.exp(-beta * t2)))
    centered = ObservationSeries.from_arrays([t1, t2], [T / 2, T / 2], [data.k1, data.k2])
    info = fisher_info(centered, lambda0, beta)
    return FitResult(lambda0, beta, info, 1.0 / math.sqrt(info), float(origin), FitMode.CLASSICAL_MLE)


def two_sample_bayes(
    data: TwoSampleInput,
    a1: float,
    a2: float,
    settings: SolverSettings = DEFAULT_SETTINGS,
    origin: float | None = None,
) -> FitResult:
    """Posterior mode with pseudo-counts ``a1``, ``a2`` added to the two periods."""
    if a1 < 0 or a2 < 0:
        raise ValueError("pseudo-counts must be nonnegative")
    augmented = replace(data, k1=data.k1 + a1, k2=data.k2 + a2)
    return replace(two_sample_fit(augmented, settings, origin), mode=FitMode.BAYES_MAP)


def cell_means(data: TwoSampleInput, a1: float = 0.0, a2: float = 0.0) -> tuple[float, float]:
    """Fitted expected counts of the two periods.

    Two parameters and two cells make the model saturated, so the fitted
    means are the (augmented) counts themselves, including when one is zero.
    """
    return (data.k1 + a1, data.k2 + a2)
