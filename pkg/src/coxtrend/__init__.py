"""Trend analysis of rare-event counts with an exponential Poisson intensity."""

__version__ = "0.1.0"

from .bayes import augment, fit_map, hpd_interval
from .estimate import (
    SolverSettings,
    confidence_interval,
    fisher_info,
    fit_mle,
    fitted_curve,
    log_likelihood,
    score_beta,
    trend_test,
)
from .model import (
    BoundaryMLEError,
    Decision,
    DegenerateDataError,
    FitMode,
    FitResult,
    IntervalEstimate,
    IntervalKind,
    IntervalRecord,
    ObservationSeries,
    PriorEntry,
    PriorSpec,
    TrendVerdict,
    WeightMode,
    default_origin,
    recenter,
    validate,
)
from .normal import normal_quantile
from .simcheck import CoverageReport, SimulationPlan, coverage_experiment, simulate_series
from .twosample import TwoSampleInput, cell_means, two_sample_bayes, two_sample_fit
