"""
Unit tests for the record engine (recordlab.records): contexts, the
conditional density and CDF, the bridge sampler and the two simulators.
"""
# pylint: disable=missing-function-docstring,invalid-name,redefined-outer-name,line-too-long
import numpy as np
import pytest
from scipy import stats

from recordlab import distributions
from recordlab.errors import ContextError, DegenerateHazard, HorizonExhausted
from recordlab.quadrature import integrate
from recordlab.records import (ConditioningContext, RecordSequence, beta_coefficient,
                               conditional_cdf, conditional_density, harmonic_number,
                               markov_spot_check, nth_record_stream, record_counts,
                               sample_conditional, sample_records_gamma,
                               sample_records_gamma_batch, sample_records_stream)
from recordlab.streams import make_stream


class TestConditioningContext:
    """Validation of (n, k, r, u, v)."""

    def test_valid(self, unit_exponential):
        ConditioningContext(3, 2, 1, 1.0, 2.0).validate(unit_exponential)

    @pytest.mark.parametrize("ctx", [
        ConditioningContext(2, 2, 1, 1.0, 2.0),
        ConditioningContext(3, 0, 1, 1.0, 2.0),
        ConditioningContext(3, 1, 0, 1.0, 2.0),
        ConditioningContext(3, 1, 1, 2.0, 1.0),
        ConditioningContext(3, 1, 1, -1.0, 2.0),
    ])
    def test_invalid(self, ctx, unit_exponential):
        with pytest.raises(ContextError):
            ctx.validate(unit_exponential)

    def test_with_gap(self):
        assert ConditioningContext(4, 3, 1, 1.0, 2.0).with_gap(2).k == 2


def test_beta_coefficient():
    assert beta_coefficient(1, 1) == 1
    assert beta_coefficient(2, 3) == 12
    assert beta_coefficient(4, 4) == 140


class TestConditionalDensity:
    """The density of X(n) between two conditioned records."""

    def test_exponential_adjacent_is_uniform(self, unit_exponential):
        ctx = ConditioningContext(2, 1, 1, 1.0, 3.0)
        assert conditional_density(unit_exponential, ctx, np.array([1.5, 2.0, 2.9])) == pytest.approx([0.5, 0.5, 0.5])

    def test_zero_outside(self, unit_exponential, bridge_context):
        assert conditional_density(unit_exponential, bridge_context, 0.5) == 0.0
        assert conditional_density(unit_exponential, bridge_context, 5.0) == 0.0

    @pytest.mark.parametrize("d", [
        distributions.shifted_exponential(0.5, 1.0),
        distributions.weibull(1.0, 2.0),
        distributions.pareto(1.0, 2.0),
        distributions.uniform(0.0, 10.0),
    ], ids=lambda d: d.label)
    def test_normalized(self, d):
        ctx = ConditioningContext(4, 2, 2, 1.5, 4.0)
        assert integrate(lambda t: conditional_density(d, ctx, t), ctx.u, ctx.v) == pytest.approx(1.0, abs=1e-10)

    def test_degenerate_hazard(self, unit_exponential):
        ctx = ConditioningContext(2, 1, 1, 1.0, 1.0 + 1e-15)
        with pytest.raises(DegenerateHazard):
            conditional_density(unit_exponential, ctx, 1.0)

    def test_cdf_matches_integrated_density(self, pareto_1_2):
        ctx = ConditioningContext(3, 2, 3, 1.5, 6.0)
        for t in (2.0, 3.0, 5.0):
            area = integrate(lambda x: conditional_density(pareto_1_2, ctx, x), ctx.u, t)
            assert conditional_cdf(pareto_1_2, ctx, t) == pytest.approx(area, abs=1e-10)
        assert conditional_cdf(pareto_1_2, ctx, 1.0) == 0.0
        assert conditional_cdf(pareto_1_2, ctx, 7.0) == 1.0


class TestBridgeSampler:
    """Exact draws of X(n) given X(n-k) = u and X(n+r) = v."""

    def test_single_draw(self, unit_exponential, bridge_context, rng):
        draw = sample_conditional(unit_exponential, bridge_context, rng)
        assert isinstance(draw, float)
        assert 1.0 < draw < 5.0

    def test_mean(self, unit_exponential, bridge_context, rng):
        draws = sample_conditional(unit_exponential, bridge_context, rng, size=200000)
        assert np.all((draws > 1.0) & (draws < 5.0))
        error = draws.std(ddof=1) / np.sqrt(draws.size)
        assert abs(draws.mean() - 2.6) < 4 * error

    def test_matches_conditional_cdf(self, pareto_1_2, rng):
        ctx = ConditioningContext(3, 2, 1, 1.5, 4.0)
        draws = sample_conditional(pareto_1_2, ctx, rng, size=5000)
        result = stats.kstest(draws, lambda t: conditional_cdf(pareto_1_2, ctx, t))
        assert result.pvalue > 0.001

    def test_same_stream_same_draws(self, unit_exponential, bridge_context):
        first = sample_conditional(unit_exponential, bridge_context, make_stream(7, "a"), size=10)
        second = sample_conditional(unit_exponential, bridge_context, make_stream(7, "a"), size=10)
        assert np.array_equal(first, second)


class TestSimulation:
    """Stream oracle and hazard-transform sampler."""

    def test_stream_records_increase(self, unit_uniform, rng):
        records = sample_records_stream(unit_uniform, rng, 5000)
        assert isinstance(records, RecordSequence)
        assert records.is_valid(unit_uniform)
        assert records.times[0] == 1
        assert np.all(np.diff(records.times) > 0)
        assert records.times[-1] <= 5000

    def test_stream_max_records(self, unit_uniform, rng):
        assert len(sample_records_stream(unit_uniform, rng, 10 ** 6, max_records=3)) == 3

    def test_horizon_bounds(self, unit_uniform, rng):
        with pytest.raises(ValueError):
            sample_records_stream(unit_uniform, rng, 0)
        with pytest.raises(ValueError):
            sample_records_stream(unit_uniform, rng, 10 ** 7 + 1)

    def test_horizon_exhausted(self, unit_uniform, rng):
        with pytest.raises(HorizonExhausted):
            nth_record_stream(unit_uniform, rng, 50, horizon=10)

    def test_gamma_sampler(self, unit_exponential, rng):
        records = sample_records_gamma(unit_exponential, rng, 5)
        assert len(records) == 5
        assert records.is_valid(unit_exponential)

    def test_gamma_batch_mean(self, unit_exponential, rng):
        paths = sample_records_gamma_batch(unit_exponential, rng, 3, 50000)
        assert paths.shape == (50000, 3)
        error = paths[:, 2].std(ddof=1) / np.sqrt(50000)
        assert abs(paths[:, 2].mean() - 3.0) < 4 * error

    def test_record_counts_follow_harmonic_numbers(self, unit_uniform):
        counts = record_counts(unit_uniform, make_stream(42, "record-counts"), 1000, 10000)
        error = counts.std(ddof=1) / np.sqrt(counts.size)
        assert harmonic_number(1000) == pytest.approx(7.4855, abs=1e-4)
        assert abs(counts.mean() - harmonic_number(1000)) < 3 * error

    def test_gamma_and_stream_second_record_agree(self):
        d = distributions.weibull(1.0, 2.0)
        gamma_path = sample_records_gamma_batch(d, make_stream(42, "gamma-path"), 2, 2000)[:, 1]
        stream = make_stream(42, "stream-path")
        stream_path = [nth_record_stream(d, stream, 2) for _ in range(2000)]
        assert stats.ks_2samp(gamma_path, stream_path).pvalue >= 0.01

    @pytest.mark.slow
    def test_gamma_and_stream_second_record_agree_at_scale(self):
        # a path lacks a second record with probability 1/horizon; those are dropped
        d = distributions.weibull(1.0, 2.0)
        draws = 10 ** 5
        gamma_path = sample_records_gamma_batch(d, make_stream(7, "gamma-path"), 2, draws)[:, 1]
        stream = make_stream(7, "stream-path")
        paths = (sample_records_stream(d, stream, 10 ** 6, max_records=2) for _ in range(draws))
        stream_path = [path.values[1] for path in paths if len(path) >= 2]
        assert len(stream_path) >= draws - 10
        assert stats.ks_2samp(gamma_path, stream_path).pvalue >= 0.001


class TestMarkovSpotCheck:
    """Conditioning the stream oracle by acceptance."""

    def test_adjacent_only(self, unit_exponential, bridge_context, rng):
        with pytest.raises(ContextError):
            markov_spot_check(unit_exponential, bridge_context, rng, 10)

    def test_inconclusive_with_few_replications(self, unit_exponential, rng):
        ctx = ConditioningContext(2, 1, 1, 0.5, 2.0)
        result = markov_spot_check(unit_exponential, ctx, rng, 10)
        assert result.verdict == "inconclusive"
        assert result.accepted < 200

    def test_stream_agrees_with_density(self, unit_exponential):
        ctx = ConditioningContext(2, 1, 1, 0.5, 2.0)
        result = markov_spot_check(unit_exponential, ctx, make_stream(42, "spot-check"), 60000)
        assert result.accepted >= 200
        assert result.p_value > 0.001


def test_density_with_two_left_gaps(unit_exponential):
    ctx = ConditioningContext(3, 2, 1, 1.0, 3.0)
    assert conditional_density(unit_exponential, ctx, 2.0) == pytest.approx(0.5)


def test_density_ignores_n(pareto_1_2):
    t = np.array([1.6, 2.5, 3.9])
    first = conditional_density(pareto_1_2, ConditioningContext(5, 2, 2, 1.5, 4.0), t)
    second = conditional_density(pareto_1_2, ConditioningContext(9, 2, 2, 1.5, 4.0), t)
    assert np.array_equal(first, second)


@pytest.mark.parametrize("d", [distributions.weibull(1.0, 2.0), distributions.uniform(0.0, 10.0)],
                         ids=lambda d: d.label)
@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_sampler_agrees_with_density(d, k, r):
    ctx = ConditioningContext(k + 1, k, r, 1.0, 3.0)
    rng = make_stream(42, f"sampler/{d.label}", 10 * k + r)
    draws = sample_conditional(d, ctx, rng, size=10 ** 5)
    result = stats.kstest(draws, lambda t: conditional_cdf(d, ctx, t))
    assert result.pvalue > 0.001
