"""Upper record values: simulation, conditional density and bridge sampling.

Records of F map to records of the standard exponential under the hazard
transform R, so R(X(1)), R(X(2)), ... are the arrival times of a unit-rate
Poisson process. Given X(n-k) = u and X(n+r) = v, the variable
W = (R(X(n)) - R(u)) / (R(v) - R(u)) is Beta(k, r).
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import stats

from .distributions import sample
from .errors import ContextError, DegenerateHazard, HorizonExhausted
from .kernel import factorial

logger = logging.getLogger(__name__)

HORIZON_CAP = 10 ** 7
MIN_HAZARD_SPAN = 1e-14
SPOT_CHECK_MIN_ACCEPTED = 200
SPOT_CHECK_LEVEL = 0.01

_FIRST_CHUNK = 64
_MAX_CHUNK = 2 ** 20


@dataclass(frozen=True, eq=False)
class RecordSequence:
    """Strictly increasing record values X(1..n), with record times when known."""
    values: np.ndarray
    times: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.values)

    def is_valid(self, d):
        """True when the values increase strictly and stay inside d's support."""
        values = np.asarray(self.values)
        return bool(np.all(np.diff(values) > 0)
                    and np.all(values > d.support_lo) and np.all(values < d.support_hi))


@dataclass(frozen=True)
class ConditioningContext:
    """The event X(n-k) = u, X(n+r) = v."""
    n: int
    k: int
    r: int
    u: float
    v: float

    def validate(self, d=None):
        """Check 1 <= k <= n-1, r >= 1 and l_F < u < v < r_F.

        Raises:
            ContextError: If any invariant fails.
        """
        if not 1 <= self.k <= self.n - 1:
            raise ContextError(f"need 1 <= k <= n-1, got n={self.n}, k={self.k}")
        if self.r < 1:
            raise ContextError(f"need r >= 1, got r={self.r}")
        if not self.u < self.v:
            raise ContextError(f"need u < v, got u={self.u}, v={self.v}")
        if d is not None and not (d.support_lo < self.u and self.v < d.support_hi):
            raise ContextError(
                f"({self.u}, {self.v}) is not inside the support "
                f"({d.support_lo}, {d.support_hi}) of {d.label}"
            )

    def with_gap(self, k):
        """Same event with the left gap replaced by k."""
        return replace(self, k=k)


def beta_coefficient(k, r):
    """(k+r-1)! / ((k-1)! (r-1)!), exact."""
    return factorial(k + r - 1) // (factorial(k - 1) * factorial(r - 1))


# --- Simulation ---

def sample_records_stream(d, rng, horizon, max_records=None):
    """Scan an i.i.d. stream from d and keep its upper records.

    Args:
        d (DistributionModel): The distribution of the stream.
        rng (numpy.random.Generator): Random stream.
        horizon (int): Number of i.i.d. draws to scan, 1 <= horizon <= 1e7.
        max_records (int, optional): Stop as soon as this many records
            were seen.

    Returns:
        RecordSequence: Records among the first `horizon` draws, with their
            1-based record times.
    """
    if not 1 <= horizon <= HORIZON_CAP:
        raise ValueError(f"horizon must be in [1, {HORIZON_CAP}], got {horizon}")
    values, times = [], []
    current = -np.inf
    seen = 0
    chunk = _FIRST_CHUNK
    while seen < horizon:
        size = min(chunk, horizon - seen)
        draws = sample(d, rng, size)
        running = np.maximum.accumulate(np.concatenate(([current], draws)))
        hits = np.flatnonzero(draws > running[:-1])
        values.extend(draws[hits])
        times.extend(seen + hits + 1)
        current = running[-1]
        seen += size
        if max_records is not None and len(values) >= max_records:
            del values[max_records:], times[max_records:]
            break
        chunk = min(2 * chunk, _MAX_CHUNK)
    return RecordSequence(np.asarray(values, dtype=float), np.asarray(times, dtype=np.int64))


def nth_record_stream(d, rng, n, horizon=HORIZON_CAP):
    """X(n) from a single stream.

    Raises:
        HorizonExhausted: If fewer than n records occur within `horizon` draws.
    """
    records = sample_records_stream(d, rng, horizon, max_records=n)
    if len(records) < n:
        raise HorizonExhausted(f"only {len(records)} records within {horizon} draws, wanted {n}")
    return float(records.values[n - 1])


def record_counts(d, rng, horizon, replications, batch=1000):
    """Number of records among `horizon` i.i.d. draws, for each replication.

    The expected count is the harmonic number H_horizon for any continuous d.
    """
    counts = np.empty(replications, dtype=np.int64)
    batch = max(1, min(batch, HORIZON_CAP // horizon))
    for start in range(0, replications, batch):
        rows = min(batch, replications - start)
        draws = sample(d, rng, rows * horizon).reshape(rows, horizon)
        running = np.maximum.accumulate(draws, axis=1)
        counts[start:start + rows] = 1 + np.count_nonzero(running[:, 1:] > running[:, :-1], axis=1)
    return counts


def harmonic_number(n):
    """H_n = 1 + 1/2 + ... + 1/n."""
    return float(np.sum(1.0 / np.arange(1, n + 1)))


def sample_records_gamma(d, rng, n):
    """Exact sample of X(1..n) through the hazard transform.

    X(i) = R^-1(Gamma_i), where Gamma_i is the sum of i standard exponentials.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    arrivals = np.cumsum(rng.standard_exponential(n))
    return RecordSequence(np.asarray(d.from_hazard(arrivals), dtype=float).reshape(n))


def sample_records_gamma_batch(d, rng, n, replications):
    """`replications` independent record paths X(1..n), shape (replications, n)."""
    arrivals = np.cumsum(rng.standard_exponential((replications, n)), axis=1)
    return np.asarray(d.from_hazard(arrivals), dtype=float).reshape(replications, n)


# --- Conditional law of X(n) given X(n-k) = u, X(n+r) = v ---

def _hazard_span(d, ctx):
    ctx.validate(d)
    r_u = float(d.hazard_R(ctx.u))
    r_v = float(d.hazard_R(ctx.v))
    if not r_v - r_u >= MIN_HAZARD_SPAN:
        raise DegenerateHazard(f"R(v) - R(u) = {r_v - r_u:.3g} for {d.label} at ({ctx.u}, {ctx.v})")
    return r_u, r_v


def density_on(d, ctx):
    """The conditional density of X(n) as a function of t, normalized once.

    Raises:
        ContextError: If ctx is invalid for d.
        DegenerateHazard: If R(v) - R(u) is below 1e-14.
    """
    r_u, r_v = _hazard_span(d, ctx)
    span = r_v - r_u
    coefficient = beta_coefficient(ctx.k, ctx.r)
    middle = 0.5 * (ctx.u + ctx.v)

    def density(t):
        t = np.asarray(t, dtype=float)
        inside = (t > ctx.u) & (t < ctx.v)
        safe = np.where(inside, t, middle)
        r_t = d.hazard_R(safe)
        left = (r_t - r_u) / span
        right = (r_v - r_t) / span
        value = coefficient * left ** (ctx.k - 1) * right ** (ctx.r - 1) * d.hazard_R_prime(safe) / span
        return np.where(inside, value, 0.0)[()]

    return density


def conditional_density(d, ctx, t):
    """Density of X(n) given X(n-k) = u and X(n+r) = v, at t.

    Args:
        d (DistributionModel): The parent distribution.
        ctx (ConditioningContext): The conditioning event.
        t (float or numpy.ndarray): Evaluation points.

    Returns:
        float or numpy.ndarray: The density; zero outside (u, v).

    Raises:
        ContextError: If ctx is invalid for d.
        DegenerateHazard: If R(v) - R(u) is below 1e-14.
    """
    return density_on(d, ctx)(t)


def conditional_cdf(d, ctx, t):
    """P(X(n) <= t | X(n-k) = u, X(n+r) = v), via the Beta(k, r) law in hazard space."""
    r_u, r_v = _hazard_span(d, ctx)
    t = np.asarray(t, dtype=float)
    safe = np.clip(t, ctx.u, ctx.v)
    w = np.clip((d.hazard_R(safe) - r_u) / (r_v - r_u), 0.0, 1.0)
    return np.where(t <= ctx.u, 0.0, np.where(t >= ctx.v, 1.0, stats.beta.cdf(w, ctx.k, ctx.r)))[()]


def sample_conditional(d, ctx, rng, size=None):
    """Exact bridge sample of X(n) given X(n-k) = u and X(n+r) = v.

    B = G1 / (G1 + G2) with G1 a sum of k and G2 a sum of r standard
    exponentials is Beta(k, r); the draw is R^-1(R(u) + (R(v) - R(u)) B).

    Args:
        d (DistributionModel): The parent distribution.
        ctx (ConditioningContext): The conditioning event.
        rng (numpy.random.Generator): Random stream.
        size (int, optional): Number of draws; a single float when omitted.

    Returns:
        float or numpy.ndarray: Draws strictly inside (u, v).
    """
    r_u, r_v = _hazard_span(d, ctx)
    shape = () if size is None else (size,)
    left = rng.standard_exponential((ctx.k,) + shape).sum(axis=0)
    right = rng.standard_exponential((ctx.r,) + shape).sum(axis=0)
    bridge = left / (left + right)
    draws = np.asarray(d.from_hazard(r_u + (r_v - r_u) * bridge), dtype=float)
    draws = np.clip(draws, np.nextafter(ctx.u, ctx.v), np.nextafter(ctx.v, ctx.u))
    return float(draws) if size is None else draws


# --- Markov consistency spot check ---

@dataclass(frozen=True)
class SpotCheckResult:
    """Outcome of the stream-conditioning spot check."""
    accepted: int
    statistic: float
    p_value: float
    verdict: str


def markov_spot_check(d, ctx, rng, replications, horizon=10 ** 4, bins=10):
    """Compare the stream oracle, conditioned by acceptance, with the density.

    Keeps replications with X(n-1) within h of u and X(n+1) within h of v,
    h = 0.05 (v - u), and tests the histogram of X(n) against the
    conditional law with a chi-square test on `bins` equal bins.

    Returns:
        SpotCheckResult: verdict is 'pass', 'fail' or 'inconclusive' (fewer
            than 200 accepted replications).

    Raises:
        ContextError: Unless k = r = 1.
    """
    if ctx.k != 1 or ctx.r != 1:
        raise ContextError("the spot check conditions on adjacent records only (k = r = 1)")
    _hazard_span(d, ctx)
    window = 0.05 * (ctx.v - ctx.u)
    accepted = []
    for _ in range(replications):
        records = sample_records_stream(d, rng, horizon, max_records=ctx.n + 1)
        if len(records) < ctx.n + 1:
            continue
        before, middle, after = records.values[ctx.n - 2:ctx.n + 1]
        if abs(before - ctx.u) <= window and abs(after - ctx.v) <= window:
            accepted.append(middle)
    if len(accepted) < SPOT_CHECK_MIN_ACCEPTED:
        logger.warning("spot check inconclusive: %d accepted of %d", len(accepted), replications)
        return SpotCheckResult(len(accepted), float("nan"), float("nan"), "inconclusive")
    edges = np.linspace(ctx.u, ctx.v, bins + 1)
    observed, _ = np.histogram(np.clip(accepted, ctx.u, ctx.v), bins=edges)
    expected = np.diff(conditional_cdf(d, ctx, edges)) * len(accepted)
    statistic, p_value = stats.chisquare(observed, expected * observed.sum() / expected.sum())
    verdict = "pass" if p_value >= SPOT_CHECK_LEVEL else "fail"
    return SpotCheckResult(len(accepted), float(statistic), float(p_value), verdict)
