"""Maximum-likelihood fit of the exponential-trend Poisson model.

The intensity of interval ``i`` is ``lambda0 * T_i * exp(-beta * t_i)``.
``beta`` is found as the root of the profile score equation; ``lambda0``
then has a closed form. Fisher information treats ``lambda0`` as known, so
``I = sum(lambda0 * T_i * t_i**2 * exp(-beta * t_i))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln, logsumexp

from .model import (
    BoundaryMLEError,
    DegenerateDataError,
    FitMode,
    FitResult,
    IntervalEstimate,
    IntervalKind,
    ObservationSeries,
    TrendVerdict,
    check,
    default_origin,
    recenter,
)
from .normal import upper_quantile

BOUNDARY_BETA_TIMES_T = 500.0


@dataclass(frozen=True)
class SolverSettings:
    tolerance: float = 1e-10
    max_iterations: int = 200
    initial_bracket_halfwidth: float = 1.0

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.initial_bracket_halfwidth > 0:
            raise ValueError("initial_bracket_halfwidth must be positive")


DEFAULT_SETTINGS = SolverSettings()


def _require_positive(lambda0: float) -> None:
    if not lambda0 > 0:
        raise ValueError(f"lambda0 must be > 0, got {lambda0!r}")


def log_likelihood(series: ObservationSeries, lambda0: float, beta: float) -> float:
    _require_positive(lambda0)
    t, T, k = series.centers, series.lengths, series.counts
    eta = math.log(lambda0) - beta * t + np.log(T)
    return float(np.sum(k * eta - gammaln(k + 1.0) - np.exp(eta)))


def score_beta(series: ObservationSeries, beta: float) -> float:
    """Profile score g(beta); the MLE of beta is its root.

    ``g(b) = sum(k t) * sum(T e^{-b t}) - sum(k) * sum(t T e^{-b t})``
    """
    t, T, k = series.centers, series.lengths, series.counts
    if not k.sum() > 0:
        raise DegenerateDataError("score is undefined without events (sum of counts is 0)")
    w = T * np.exp(-beta * t)
    return float(np.dot(k, t) * w.sum() - k.sum() * np.dot(t, w))


def _weighted_time_gap(t, T, k_mean_time, beta):
    # -g(beta) / (sum(k) * sum(w)), computed with a max-shifted exponent.
    # Strictly decreasing in beta since its derivative is -Var_w(t).
    e = -beta * t
    w = T * np.exp(e - e.max())
    return float(np.dot(w, t) / w.sum() - k_mean_time)


def fisher_info(series: ObservationSeries, lambda0: float, beta: float) -> float:
    _require_positive(lambda0)
    t, T = series.centers, series.lengths
    return float(np.sum(lambda0 * T * t**2 * np.exp(-beta * t)))


def _solve_beta(centered: ObservationSeries, settings: SolverSettings) -> float:
    t, T, k = centered.centers, centered.lengths, centered.counts
    k_mean_time = float(np.dot(k, t) / k.sum())
    limit = BOUNDARY_BETA_TIMES_T / float(np.max(np.abs(t)))

    def h(beta):
        return _weighted_time_gap(t, T, k_mean_time, beta)

    half = min(settings.initial_bracket_halfwidth, limit)
    lo, hi = -half, half
    f_lo, f_hi = h(lo), h(hi)
    while f_lo < 0 or f_hi > 0:
        if half >= limit:
            raise BoundaryMLEError(f"no finite root of the score equation within |beta| <= {limit:.6g}")
        half = min(2.0 * half, limit)
        if f_lo < 0:
            lo = -half
            f_lo = h(lo)
        if f_hi > 0:
            hi = half
            f_hi = h(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    return brentq(h, lo, hi, xtol=settings.tolerance, maxiter=settings.max_iterations)


def fit_mle(
    series: ObservationSeries,
    settings: SolverSettings = DEFAULT_SETTINGS,
    origin: float | None = None,
) -> FitResult:
    """Classical maximum-likelihood fit of (lambda0, beta).

    Times are measured from ``origin`` (the window midpoint by default);
    beta does not depend on that choice, lambda0 and the information do.

    Raises
    ------
    DegenerateDataError
        Fewer than two intervals, or no events at all.
    BoundaryMLEError
        Every event falls in the earliest interval, or every event in the
        latest one, so the likelihood increases without bound in beta.
    """
    check(series)
    if len(series) < 2:
        raise DegenerateDataError("at least two intervals are needed to estimate a trend")
    k = series.counts
    if not k.sum() > 0:
        raise DegenerateDataError("no events in the series (sum of counts is 0)")
    positive = np.flatnonzero(k > 0)
    if positive[0] == positive[-1] and positive[0] in (0, len(k) - 1):
        where = "earliest" if positive[0] == 0 else "latest"
        raise BoundaryMLEError(f"all events fall in the {where} interval; beta-hat is infinite")

    midpoint = default_origin(series)
    if origin is None:
        origin = midpoint
    # beta-hat does not depend on the origin; solving on window-centered
    # times keeps the boundary limit and the exponentials well scaled.
    beta = float(_solve_beta(recenter(series, midpoint), settings))
    centered = recenter(series, origin)
    log_lambda0 = math.log(k.sum()) - float(logsumexp(np.log(centered.lengths) - beta * centered.centers))
    lambda0 = math.exp(log_lambda0) if log_lambda0 < 709.0 else math.inf
    if not 0 < lambda0 < math.inf:
        raise OverflowError(
            f"lambda0 at origin {origin!r} is not representable (log lambda0 = {log_lambda0:.6g}); "
            "choose an origin inside the observation window"
        )
    info = fisher_info(centered, lambda0, beta)
    sigma = 1.0 / math.sqrt(info) if info > 0 else math.inf
    return FitResult(lambda0, beta, info, sigma, float(origin), FitMode.CLASSICAL_MLE)


def wald_half_width(fit: FitResult, alpha: float) -> float:
    if not 0 < alpha < 0.5:
        raise ValueError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    if not fit.information > 0:
        raise ValueError("Fisher information is zero; no interval can be formed")
    # sigma = I**-0.5; the tabulated interval bounds are only consistent with
    # the inverse root, not with sqrt(I).
    return upper_quantile(alpha) / math.sqrt(fit.information)


def confidence_interval(fit: FitResult, alpha: float = 0.05) -> IntervalEstimate:
    """Two-sided Wald interval for beta with coverage ``1 - 2*alpha``."""
    hw = wald_half_width(fit, alpha)
    return IntervalEstimate(fit.beta_hat - hw, fit.beta_hat + hw, alpha, fit.beta_hat, IntervalKind.CONFIDENCE)


def trend_test(fit: FitResult, alpha: float = 0.05) -> TrendVerdict:
    """One-sided tests at level ``alpha`` for a decrease and an increase."""
    hw = wald_half_width(fit, alpha)
    return TrendVerdict(fit.beta_hat - hw, fit.beta_hat + hw, alpha)


def fitted_curve(fit: FitResult, series: ObservationSeries) -> list[tuple[float, float]]:
    """Expected count per interval under the fit, as (center, expected) pairs."""
    t = series.centers
    expected = fit.lambda0_hat * series.lengths * np.exp(-fit.beta_hat * (t - fit.time_origin))
    return [(float(c), float(e)) for c, e in zip(t, expected)]
