"""End-to-end acceptance checks, one marker per criterion.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import itertools
import json
import time
from pathlib import Path

import numpy as np
import pytest

from coxtrend.bayes import fit_map, hpd_interval
from coxtrend.estimate import confidence_interval, fit_mle, fitted_curve
from coxtrend.model import ObservationSeries, PriorSpec, recenter
from coxtrend.simcheck import SimulationPlan, coverage_experiment, prior_corruption_demo
from coxtrend.twosample import TwoSampleInput, two_sample_bayes, two_sample_fit
from oracles import grid_search_mle, matches_4_sig_figs

FIXTURES = Path(__file__).parent / "fixtures"

# (k1, k2): classical (beta, I, lower, upper), Bayes a1=a2=2 (beta, I, lower, upper)
REFERENCE_ROWS = {
    "EU28+NO+CH": ((35, 34), (5.798e-03, 431.25, -7.341e-02, 8.500e-02),
                   (5.480e-03, 456.25, -7.153e-02, 8.249e-02)),
    "Greece": ((2, 1), (1.386e-01, 18.75, -2.412e-01, 5.185e-01),
               (5.754e-02, 43.75, -1.911e-01, 3.062e-01)),
    "France": ((1, 2), (-1.386e-01, 18.75, -5.185e-01, 2.412e-01),
               (-5.754e-02, 43.75, -3.062e-01, 1.911e-01)),
}
EX1_ROW = ((84, 100), (-3.487e-02, 1150, -8.337e-02, 1.363e-02),
               (-3.413e-02, 1175, -8.211e-02, 1.386e-02))


def reference_cells(k1, k2, classical, bayes):
    data = TwoSampleInput(k1, k2, 10.0)
    mle = two_sample_fit(data)
    ci = confidence_interval(mle, 0.05)
    fmap = two_sample_bayes(data, 2.0, 2.0)
    hpd = hpd_interval(fmap, 0.05)
    got = (mle.beta_hat, mle.information, ci.lower, ci.upper,
           fmap.beta_hat, fmap.information, hpd.lower, hpd.upper)
    return list(zip(got, classical + bayes))


@pytest.mark.criterion(1, "EU, Greece and France two-sample rows reproduced, 24 values to 4 significant figures, < 1 s")
def test_reference_rows():
    start = time.perf_counter()
    cells = [cell for (k1, k2), c, b in REFERENCE_ROWS.values() for cell in reference_cells(k1, k2, c, b)]
    elapsed = time.perf_counter() - start
    assert len(cells) == 24
    bad = [(got, printed) for got, printed in cells if not matches_4_sig_figs(got, printed)]
    assert not bad
    assert elapsed < 1.0


@pytest.mark.criterion(2, "hypothetical Ex1 two-sample row reproduced to 4 significant figures, < 1 s")
def test_ex1_row():
    start = time.perf_counter()
    (k1, k2), classical, bayes = EX1_ROW
    cells = reference_cells(k1, k2, classical, bayes)
    elapsed = time.perf_counter() - start
    assert all(matches_4_sig_figs(got, printed) for got, printed in cells), cells
    assert elapsed < 1.0


def _finite_mle(counts):
    nz = np.flatnonzero(counts)
    return sum(counts) >= 2 and not (nz[0] == nz[-1] and nz[0] in (0, len(counts) - 1))


@pytest.mark.criterion(3, "fit_mle matches a brute-force grid search on every small series, < 2 min")
def test_oracle_equivalence():
    start = time.perf_counter()
    checked = 0
    worst_beta = worst_lambda = 0.0
    for n in (2, 3, 4):
        t = np.arange(n) - (n - 1) / 2
        T = np.ones(n)
        for counts in itertools.product(range(7), repeat=n):
            if not _finite_mle(counts):
                continue
            fit = fit_mle(ObservationSeries.from_arrays(t, T, counts))
            lam, beta = grid_search_mle(t, T, counts)
            worst_beta = max(worst_beta, abs(fit.beta_hat - beta))
            worst_lambda = max(worst_lambda, abs(fit.lambda0_hat / lam - 1))
            checked += 1
    elapsed = time.perf_counter() - start
    print(f"\n{checked} series, max |dbeta| {worst_beta:.2e}, max rel dlambda0 {worst_lambda:.2e}, {elapsed:.1f} s")
    assert checked > 2500
    assert worst_beta <= 1e-4
    assert worst_lambda <= 1e-4
    assert elapsed < 120


@pytest.mark.criterion(4, "coverage in [0.88, 0.92] and one-sided rejection <= 0.06 over 10,000 replicates, < 1 min")
def test_coverage():
    plan = SimulationPlan.uniform_layout(10, 1.0, true_lambda0=5.0, true_beta=0.0,
                                         replications=10_000, alpha=0.05, seed=42)
    start = time.perf_counter()
    report = coverage_experiment(plan)
    elapsed = time.perf_counter() - start
    print(f"\ncoverage {report.empirical_coverage:.4f}, rejection {report.empirical_rejection_rate:.4f}, {elapsed:.1f} s")
    assert 0.88 <= report.empirical_coverage <= 0.92
    assert report.empirical_rejection_rate <= 0.06
    assert elapsed < 60


def random_series(rng, n_max=6, count_max=20):
    while True:
        n = int(rng.integers(2, n_max + 1))
        lengths = rng.uniform(0.5, 3.0, n)
        gaps = rng.uniform(0.0, 1.0, n)
        starts = 2000.0 + np.cumsum(gaps + np.concatenate(([0.0], lengths[:-1])))
        counts = rng.integers(0, count_max + 1, n)
        if _finite_mle(counts):
            return ObservationSeries.from_arrays(starts + lengths / 2, lengths, counts)


PROPERTY = "property suites: shift invariance, mass conservation, count scaling, swap antisymmetry, Bayes dominance"


@pytest.mark.criterion(5, PROPERTY)
def test_shift_invariance():
    rng = np.random.default_rng(51)
    for _ in range(300):
        s = random_series(rng)
        shifted = recenter(s, float(rng.uniform(-1e3, 1e3)))
        assert abs(fit_mle(s).beta_hat - fit_mle(shifted).beta_hat) <= 1e-9


@pytest.mark.criterion(5, PROPERTY)
def test_mass_conservation():
    rng = np.random.default_rng(52)
    for _ in range(300):
        s = random_series(rng)
        fit = fit_mle(s)
        total = sum(f for _, f in fitted_curve(fit, s))
        assert total == pytest.approx(s.total_count, rel=1e-9)


@pytest.mark.criterion(5, PROPERTY)
def test_count_scaling():
    rng = np.random.default_rng(53)
    for _ in range(300):
        s = random_series(rng)
        m = int(rng.integers(2, 6))
        base, scaled = fit_mle(s), fit_mle(s.with_counts(s.counts * m))
        assert abs(scaled.beta_hat - base.beta_hat) <= 1e-9
        assert scaled.information == pytest.approx(m * base.information, rel=1e-9)


@pytest.mark.criterion(5, PROPERTY)
def test_swap_antisymmetry():
    for k1, k2 in itertools.product(range(1, 101), repeat=2):
        a, b = two_sample_fit(TwoSampleInput(k1, k2, 10.0)), two_sample_fit(TwoSampleInput(k2, k1, 10.0))
        assert b.beta_hat == -a.beta_hat
        assert b.information == a.information


@pytest.mark.criterion(5, PROPERTY)
def test_bayes_information_dominance():
    rng = np.random.default_rng(55)
    cases = 0
    while cases < 1000:
        n = int(rng.integers(2, 7))
        counts = rng.integers(0, 21, n)
        if not _finite_mle(counts):
            continue
        s = ObservationSeries.from_arrays(np.arange(n) - (n - 1) / 2, 1.0, counts)
        prior = PriorSpec.pseudo_counts(s.centers, rng.uniform(0.0, 5.0, n))
        assert fit_map(s, prior).information >= fit_mle(s).information * (1 - 1e-12)
        cases += 1


@pytest.mark.criterion(6, "two-sample closed form equals the general solver to 1e-9 for k1, k2 in [1, 100]")
def test_closed_form_agreement():
    worst = 0.0
    for k1, k2 in itertools.product(range(1, 101), repeat=2):
        data = TwoSampleInput(k1, k2, 10.0)
        worst = max(worst, abs(two_sample_fit(data).beta_hat - fit_mle(data.series()).beta_hat))
    assert worst <= 1e-9


@pytest.mark.criterion(7, "seeded prior-corruption report is reproducible and the verdicts differ")
def test_prior_corruption():
    frozen = json.loads((FIXTURES / "prior_corruption.json").read_text())
    frozen.pop("version")
    doc = prior_corruption_demo(seed=frozen["seed"])
    assert doc == prior_corruption_demo(seed=frozen["seed"])
    assert doc.keys() == frozen.keys()
    assert doc["counts"] == frozen["counts"]
    assert doc["replicate_index"] == frozen["replicate_index"]
    for side in ("classical", "bayes"):
        assert doc[side]["decision"] == frozen[side]["decision"]
        for key, value in frozen[side].items():
            if key != "decision":
                assert doc[side][key] == pytest.approx(value, rel=1e-9)
    assert frozen["classical"]["decision"] == "SIGNIFICANT_DECREASE"
    assert frozen["bayes"]["decision"] != frozen["classical"]["decision"]
