"""Conjugate-prior layer: MAP estimate by data augmentation.

The prior has the same form as the likelihood, so it acts as if ``a_i``
extra events had been seen in interval ``i``. The posterior mode is the
maximum-likelihood fit of the augmented counts, and the approximate HPD
interval is the normal approximation around that mode.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .estimate import DEFAULT_SETTINGS, SolverSettings, wald_half_width, fit_mle
from .model import (
    FitMode,
    FitResult,
    IntervalEstimate,
    IntervalKind,
    ObservationSeries,
    PriorMismatchError,
    PriorSpec,
    WeightMode,
)

TAU_TOL = 1e-9


def augment(series: ObservationSeries, prior: PriorSpec) -> ObservationSeries:
    """Fold the prior pseudo-counts into the observed counts.

    AUGMENT mode gives ``k + a``; BLEND mode gives ``q*k + (1 - q)*a``.
    """
    if len(prior.entries) != len(series):
        raise PriorMismatchError(
            f"prior has {len(prior.entries)} entries but the series has {len(series)} intervals"
        )
    taus, t = prior.taus, series.centers
    bad = np.flatnonzero(np.abs(taus - t) > TAU_TOL)
    if bad.size:
        i = int(bad[0])
        raise PriorMismatchError(f"prior entry {i}: tau={taus[i]!r} does not match interval center {t[i]!r}")
    a = prior.a
    if np.any(a < 0):
        raise ValueError("prior pseudo-counts must be >= 0")
    k = series.counts

    if prior.weight_mode is WeightMode.AUGMENT:
        return series.with_counts(k + a)

    if prior.weights is None:
        raise ValueError("BLEND mode needs one weight q per entry")
    q = np.asarray(prior.weights, dtype=float)
    if q.shape != a.shape:
        raise PriorMismatchError(f"expected {a.size} weights, got {q.size}")
    if np.any((q < 0) | (q > 1)):
        raise ValueError("blend weights must lie in [0, 1]")
    return series.with_counts(q * k + (1.0 - q) * a)


def fit_map(
    series: ObservationSeries,
    prior: PriorSpec,
    settings: SolverSettings = DEFAULT_SETTINGS,
    origin: float | None = None,
) -> FitResult:
    """Posterior mode of (lambda0, beta); information is that of the augmented data."""
    fit = fit_mle(augment(series, prior), settings, origin)
    return replace(fit, mode=FitMode.BAYES_MAP)


def hpd_interval(fit: FitResult, alpha: float = 0.05) -> IntervalEstimate:
    if fit.mode is not FitMode.BAYES_MAP:
        raise ValueError("hpd_interval needs a BAYES_MAP fit; use confidence_interval for MLE fits")
    hw = wald_half_width(fit, alpha)
    return IntervalEstimate(fit.beta_hat - hw, fit.beta_hat + hw, alpha, fit.beta_hat, IntervalKind.HPD_APPROX)
