"""Record simulations, summarized or as raw samples for reporting.

Each mode draws from its own stream keyed by the mode name, so the summaries
for a given seed never depend on which other simulations ran.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .records import (conditional_cdf, harmonic_number, record_counts, sample_conditional,
                      sample_records_gamma_batch, sample_records_stream)
from .regression import cond_expect_quadrature
from .streams import make_stream

logger = logging.getLogger(__name__)

RECORDS_GAMMA = "records-gamma"
RECORDS_STREAM = "records-stream"
CONDITIONAL = "conditional"
MODES = (RECORDS_GAMMA, RECORDS_STREAM, CONDITIONAL)


@dataclass(frozen=True)
class SummaryRow:
    """One summarized statistic; reference is the theoretical value or NaN."""
    mode: str
    distribution: str
    statistic: str
    index: int
    count: int
    mean: float
    std_error: float
    reference: float = math.nan


@dataclass(frozen=True)
class SampleRow:
    """One simulated record value.

    replicate numbers the path (or the draw, for conditional samples) and
    index is the record index. time is the 1-based record time from the
    stream oracle, NaN otherwise.
    """
    mode: str
    distribution: str
    replicate: int
    index: int
    value: float
    time: float = math.nan


def _mean_and_se(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()) if values.size else math.nan, math.nan
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def records_gamma_paths(d, seed, n, replications):
    """(replications, n) array of X(1..n) from the hazard-transform sampler."""
    return sample_records_gamma_batch(d, make_stream(seed, RECORDS_GAMMA), n, replications)


def records_stream_paths(d, seed, horizon, replications, n=3):
    """Record sequences of at most n records within `horizon` draws, one stream per replicate."""
    return [sample_records_stream(d, make_stream(seed, RECORDS_STREAM, replicate + 1), horizon,
                                  max_records=n)
            for replicate in range(replications)]


def conditional_draws(d, ctx, seed, samples):
    """Bridge draws of X(n) given the context."""
    return sample_conditional(d, ctx, make_stream(seed, CONDITIONAL), size=samples)


def simulate_records_gamma(d, seed, n, replications):
    """Mean of X(1..n) over replications of the hazard-transform sampler."""
    paths = records_gamma_paths(d, seed, n, replications)
    rows = []
    for index in range(n):
        mean, se = _mean_and_se(paths[:, index])
        rows.append(SummaryRow(RECORDS_GAMMA, d.label, "X(i)", index + 1, replications, mean, se))
    return rows


def simulate_records_stream(d, seed, horizon, replications, n=3):
    """Record counts within `horizon` draws and the means of X(1..n) from the stream oracle.

    The expected record count is the harmonic number H_horizon.
    """
    counts = record_counts(d, make_stream(seed, RECORDS_STREAM), horizon, replications)
    mean, se = _mean_and_se(counts)
    rows = [SummaryRow(RECORDS_STREAM, d.label, "record_count", 0, replications, mean, se,
                       harmonic_number(horizon))]
    values = [[] for _ in range(n)]
    for records in records_stream_paths(d, seed, horizon, replications, n):
        for index, value in enumerate(records.values):
            values[index].append(value)
    for index, column in enumerate(values):
        mean, se = _mean_and_se(column)
        rows.append(SummaryRow(RECORDS_STREAM, d.label, "X(i)", index + 1, len(column), mean, se))
    return rows


def simulate_conditional(d, ctx, seed, samples):
    """Bridge draws of X(n) given the context, against quadrature and the exact CDF.

    Returns the draw mean with the quadrature mean as reference, and the
    Kolmogorov-Smirnov p-value of the draws against the conditional CDF.
    """
    draws = conditional_draws(d, ctx, seed, samples)
    mean, se = _mean_and_se(draws)
    reference = cond_expect_quadrature(d, ctx, lambda t: t)
    test = stats.kstest(draws, lambda t: conditional_cdf(d, ctx, t))
    logger.info("conditional draws at %s: mean %.6g (quadrature %.6g), KS p=%.3g",
                ctx, mean, reference, test.pvalue)
    return [
        SummaryRow(CONDITIONAL, d.label, "X(n)", ctx.n, samples, mean, se, reference),
        SummaryRow(CONDITIONAL, d.label, "ks_pvalue", ctx.n, samples, float(test.pvalue), math.nan),
    ]


def gamma_sample_rows(d, seed, n, replications):
    paths = records_gamma_paths(d, seed, n, replications)
    return [SampleRow(RECORDS_GAMMA, d.label, replicate + 1, index + 1, float(value))
            for replicate, path in enumerate(paths) for index, value in enumerate(path)]


def stream_sample_rows(d, seed, horizon, replications, n=3):
    rows = []
    for replicate, records in enumerate(records_stream_paths(d, seed, horizon, replications, n)):
        for index, (value, time) in enumerate(zip(records.values, records.times)):
            rows.append(SampleRow(RECORDS_STREAM, d.label, replicate + 1, index + 1, float(value),
                                  float(time)))
    return rows


def conditional_sample_rows(d, ctx, seed, samples):
    """The raw draws of simulate_conditional, one row each, indexed by ctx.n."""
    draws = conditional_draws(d, ctx, seed, samples)
    return [SampleRow(CONDITIONAL, d.label, draw + 1, ctx.n, float(value))
            for draw, value in enumerate(np.atleast_1d(draws))]
