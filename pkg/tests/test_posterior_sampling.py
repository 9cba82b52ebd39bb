"""Monte Carlo posterior layer: transformed-sample determinism and range,
sample means against closed-form moments, scalar summaries (including the
constant-sample mode convention), the histogram mode, and the repeat-based
density uncertainty bands.
"""

import math

import numpy as np
import pytest

from ambiq.exceptions import DomainError, TooFewSamples
from ambiq.measures import MeasureKind
from ambiq.numerics import DirichletParams
from ambiq.posterior_analytics import expected_amb, expected_amb_modified, var_amb
from ambiq.posterior_sampling import (
    MODE_BINS,
    DensityEstimate,
    PosteriorSummary,
    density_with_uncertainty,
    histogram_mode,
    sample_transformed,
    summarize,
)

PARAMS = DirichletParams(proper=(2.0, 1.0, 3.0), cs=1.0)


class TestSampleTransformed:
    def test_deterministic(self):
        a = sample_transformed(PARAMS, MeasureKind.NEW, 2000, seed=3)
        b = sample_transformed(PARAMS, MeasureKind.NEW, 2000, seed=3)
        np.testing.assert_array_equal(a, b)

    def test_seed_changes_sample(self):
        a = sample_transformed(PARAMS, MeasureKind.NEW, 2000, seed=3)
        b = sample_transformed(PARAMS, MeasureKind.NEW, 2000, seed=4)
        assert not np.array_equal(a, b)

    def test_values_in_unit_interval(self):
        for kind in MeasureKind:
            values = sample_transformed(PARAMS, kind, 5000, seed=1)
            assert values.shape == (5000,)
            assert np.all(values >= 0.0) and np.all(values <= 1.0)

    def test_mean_matches_closed_form(self):
        n = 200_000
        for kind, expected in (
            (MeasureKind.NEW, expected_amb(PARAMS)),
            (MeasureKind.MODIFIED, expected_amb_modified(PARAMS)),
        ):
            values = sample_transformed(PARAMS, kind, n, seed=8)
            se = float(np.std(values)) / math.sqrt(n)
            assert float(np.mean(values)) == pytest.approx(expected, abs=4 * se)

    def test_rejects_nonpositive_count(self):
        with pytest.raises(DomainError):
            sample_transformed(PARAMS, MeasureKind.NEW, 0, seed=0)


@pytest.fixture(scope="module")
def sample():
    return sample_transformed(PARAMS, MeasureKind.NEW, 50_000, seed=12)


class TestSummarize:

    def test_moments(self, sample):
        out = summarize(sample)
        assert out.mean == pytest.approx(float(np.mean(sample)), abs=1e-15)
        assert out.sd == pytest.approx(float(np.std(sample)), abs=1e-15)
        # Sanity against the analytic posterior moments at this sample size.
        assert out.mean == pytest.approx(expected_amb(PARAMS), abs=0.01)
        assert out.sd == pytest.approx(math.sqrt(var_amb(PARAMS)), abs=0.01)

    def test_default_quantile_levels(self, sample):
        out = summarize(sample)
        assert set(out.quantiles) == {0.025, 0.25, 0.5, 0.75, 0.975}
        assert out.quantiles[0.5] == pytest.approx(float(np.quantile(sample, 0.5)))

    def test_credible_interval_equal_tailed(self, sample):
        out = summarize(sample, credible_mass=0.9)
        lo, hi, mass = out.credible_interval
        assert mass == 0.9
        assert lo == pytest.approx(float(np.quantile(sample, 0.05)))
        assert hi == pytest.approx(float(np.quantile(sample, 0.95)))
        inside = np.mean((sample >= lo) & (sample <= hi))
        assert inside == pytest.approx(0.9, abs=0.01)

    def test_constant_sample_mode_is_the_constant(self):
        values = np.full(2000, 0.37)
        out = summarize(values)
        assert out.mode == 0.37
        assert out.sd == pytest.approx(0.0, abs=1e-15)
        assert out.credible_interval[0] == 0.37
        assert out.credible_interval[1] == 0.37

    def test_too_few_samples(self):
        with pytest.raises(TooFewSamples):
            summarize(np.linspace(0.0, 1.0, 999))

    def test_rejects_out_of_range_values(self):
        values = np.linspace(0.0, 1.0, 2000).copy()
        values[7] = 1.5
        with pytest.raises(DomainError):
            summarize(values)

    def test_rejects_nan(self):
        values = np.linspace(0.0, 1.0, 2000).copy()
        values[0] = math.nan
        with pytest.raises(DomainError):
            summarize(values)

    def test_rejects_bad_credible_mass(self):
        values = np.linspace(0.0, 1.0, 2000)
        with pytest.raises(DomainError):
            summarize(values, credible_mass=1.0)
        with pytest.raises(DomainError):
            summarize(values, credible_mass=0.0)

    def test_custom_quantile_levels(self, sample):
        out = summarize(sample, quantile_levels=(0.1, 0.9))
        assert set(out.quantiles) == {0.1, 0.9}
        assert out.quantiles[0.1] <= out.quantiles[0.9]

    def test_summary_type_validates(self):
        with pytest.raises(DomainError):
            PosteriorSummary(
                mean=0.5,
                mode=0.5,
                sd=0.1,
                quantiles={0.25: 0.6, 0.75: 0.4},
                credible_interval=(0.3, 0.7, 0.95),
            )
        with pytest.raises(DomainError):
            PosteriorSummary(
                mean=0.5,
                mode=0.5,
                sd=0.1,
                quantiles={0.5: 0.5},
                credible_interval=(0.7, 0.3, 0.95),
            )


class TestHistogramMode:
    def test_constant_sample(self):
        assert histogram_mode(np.full(50, 0.42)) == 0.42

    def test_bump_lands_in_right_bin(self):
        rng = np.random.default_rng(6)
        values = np.clip(rng.normal(0.3, 0.01, size=20_000), 0.0, 1.0)
        mode = histogram_mode(values)
        # Mode convention: midpoint of the argmax bin of MODE_BINS fixed
        # bins on [0, 1].
        bin_index = int(mode * MODE_BINS)
        assert abs(mode - (bin_index + 0.5) / MODE_BINS) < 1e-12
        assert abs(mode - 0.3) < 2.0 / MODE_BINS

    def test_unimodal_beta_like_sample(self):
        values = sample_transformed(PARAMS, MeasureKind.MODIFIED, 100_000, seed=2)
        mode = histogram_mode(values)
        assert 0.0 <= mode <= 1.0


@pytest.fixture(scope="module")
def estimate():
    return density_with_uncertainty(
        PARAMS, MeasureKind.NEW, samples_per_repeat=20_000, bins=64, repeats=20, seed=5
    )


class TestDensityWithUncertainty:

    def test_shapes(self, estimate):
        assert estimate.bin_edges.shape == (65,)
        assert estimate.median_density.shape == (64,)
        assert estimate.iqr_lo.shape == (64,)
        assert estimate.iqr_hi.shape == (64,)

    def test_band_ordering(self, estimate):
        assert np.all(estimate.iqr_lo <= estimate.median_density + 1e-12)
        assert np.all(estimate.median_density <= estimate.iqr_hi + 1e-12)

    def test_median_density_normalizes(self, estimate):
        widths = np.diff(estimate.bin_edges)
        mass = float(np.sum(estimate.median_density * widths))
        assert mass == pytest.approx(1.0, abs=0.02)

    def test_deterministic(self):
        kwargs = dict(samples_per_repeat=5000, bins=32, repeats=5, seed=9)
        a = density_with_uncertainty(PARAMS, MeasureKind.OLD, **kwargs)
        b = density_with_uncertainty(PARAMS, MeasureKind.OLD, **kwargs)
        np.testing.assert_array_equal(a.median_density, b.median_density)
        np.testing.assert_array_equal(a.iqr_lo, b.iqr_lo)

    def test_estimate_type_validates_lengths(self):
        with pytest.raises(DomainError):
            DensityEstimate(
                bin_edges=np.linspace(0, 1, 5),
                median_density=np.ones(3),
                iqr_lo=np.ones(4),
                iqr_hi=np.ones(4),
            )
