"""Named verification scenarios and the exponentiality diagnostic.

A scenario pairs a distribution with an identity and a grid of conditioning
contexts, and states whether the identity should hold there. The mean forms
(arithmetic, geometric, harmonic) and the Weibull and Pareto examples are
regression identities for Y = T^-1(exponential records), checked against
their closed-form right sides.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import distributions, kernel
from .errors import ConfigError, DomainError, ParamError, RecordLabError
from .records import ConditioningContext
from .regression import (MONTE_CARLO, QUADRATURE, SHIFTED_PRIME, STANDARD, RegressionIdentity,
                         ResidualRow, cond_expect_mc, cond_expect_quadrature,
                         conditional_moment_tspace, residual)
from .streams import DEFAULT_SEED, make_stream
from .utils.decorators import row_guard

logger = logging.getLogger(__name__)

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"

HOLD_TOLERANCE = 1e-6
FAIL_FLOOR = 1e-3

DEFAULT_QUANTILE_PAIRS = ((0.2, 0.5), (0.3, 0.8), (0.6, 0.9))
DEFAULT_KR_PAIRS = ((1, 1), (2, 1), (3, 1), (2, 2), (2, 3))


# --- Identities ---

@dataclass(frozen=True)
class IdentityFamily:
    """Regression identities with h chosen per (k, r), e.g. power_normalized(k+r).

    Attributes:
        h_for (callable): (k, r) -> DerivableFunction.
        variants (tuple): Identity variants evaluated at each context; the
            shifted form is skipped where k < 2.
        name (str): Label of the h choice.
    """
    h_for: Callable
    variants: tuple = (STANDARD,)
    name: str = "power:auto"

    @property
    def label(self):
        return self.name

    def identities(self, ctx):
        """The identities evaluated at ctx."""
        return [RegressionIdentity(self.h_for(ctx.k, ctx.r), ctx.k, ctx.r, variant)
                for variant in self.variants
                if variant != SHIFTED_PRIME or ctx.k >= 2]


def power_family(variants=(STANDARD,)):
    """h = power_normalized(k+r), whose identity reads E[X(n)] = (ru+kv)/(k+r)."""
    return IdentityFamily(lambda k, r: kernel.power_normalized(k + r), tuple(variants), "power:auto")


@dataclass(frozen=True)
class MeanForm:
    """E[g(Y(n)) | Y(n-k) = s, Y(n+1) = t] = rhs(s, t).

    Attributes:
        kind (str): 'arithmetic', 'geometric', 'harmonic', 'weibull-example'
            or 'pareto-example'.
        k (int): Left gap; the right gap is 1.
        g (callable): The statistic, vectorized.
        rhs (callable): (s, t) -> closed-form right side.
        phi (callable): The statistic in T-space, g = phi(T).
    """
    kind: str
    k: int
    g: Callable
    rhs: Callable
    phi: Callable

    @property
    def label(self):
        return self.kind

    def identities(self, ctx):
        if (ctx.k, ctx.r) != (self.k, 1):
            raise ParamError(f"{self.kind}: context gaps ({ctx.k}, {ctx.r}) must be ({self.k}, 1)")
        return [self]


@row_guard
def evaluate(d, ctx, identity, method=QUADRATURE, rng=None, n_draws=None):
    """One residual row for a regression identity or a mean form."""
    if isinstance(identity, RegressionIdentity):
        return residual(d, ctx, identity, method=method, rng=rng, n_draws=n_draws)
    rhs = float(identity.rhs(ctx.u, ctx.v))
    if method == MONTE_CARLO:
        lhs, std_error = cond_expect_mc(d, ctx, identity.g, rng, n_draws)
        return ResidualRow.build(ctx, lhs, rhs, MONTE_CARLO, identity.label, std_error)
    lhs = cond_expect_quadrature(d, ctx, identity.g)
    return ResidualRow.build(ctx, lhs, rhs, QUADRATURE, identity.label)


# --- Scenarios and reports ---

@dataclass(frozen=True)
class Scenario:
    """A distribution, an identity, a grid of contexts and the expected verdict."""
    name: str
    distribution: distributions.DistributionModel
    identity: object
    grid: tuple
    expected: str = HOLDS
    transform: Optional[distributions.TransformFamily] = None

    def __post_init__(self):
        if not self.grid:
            raise ParamError(f"{self.name}: empty grid")
        if self.expected not in (HOLDS, FAILS, None):
            raise ParamError(f"{self.name}: expected must be holds, fails or None, got {self.expected!r}")
        for ctx in self.grid:
            ctx.validate(self.distribution)


@dataclass(frozen=True)
class ResidualReport:
    """Rows of one scenario with their summary and verdict."""
    scenario: str
    rows: tuple
    max_abs_residual: float
    verdict: str
    expected: Optional[str] = None


def row_order(row):
    ctx = row.ctx
    return (ctx.n, ctx.k, ctx.r, ctx.u, ctx.v, row.identity, row.method)


def summarize(name, rows, hold_tolerance=HOLD_TOLERANCE, fail_floor=FAIL_FLOOR, expected=None):
    """Build a report: `holds` iff every row is within hold_tolerance, `fails`
    iff some row exceeds fail_floor, `inconclusive` otherwise.

    Rows that errored count against `holds` but never towards `fails`.
    """
    rows = tuple(sorted(rows, key=row_order))
    finite = [abs(row.residual) for row in rows if row.ok]
    worst = max(finite) if finite else float("nan")
    if finite and worst > fail_floor:
        verdict = FAILS
    elif finite and len(finite) == len(rows) and worst <= hold_tolerance:
        verdict = HOLDS
    else:
        verdict = INCONCLUSIVE
    return ResidualReport(name, rows, worst, verdict, expected)


def run_scenario(scenario, hold_tolerance=HOLD_TOLERANCE, fail_floor=FAIL_FLOOR,
                 method=QUADRATURE, seed=DEFAULT_SEED, n_draws=None):
    """Evaluate every identity of a scenario on its grid.

    Monte Carlo rows draw from the stream (seed, scenario name, row index),
    so a row's draws do not depend on any other row.

    Args:
        scenario (Scenario): The scenario.
        hold_tolerance (float): Largest residual for `holds`.
        fail_floor (float): Residual above which the verdict is `fails`.
        method (str): 'quadrature' or 'monte_carlo'.
        seed (int): Master seed for Monte Carlo.
        n_draws (int, optional): Monte Carlo sample size per row.

    Returns:
        ResidualReport: The report, rows in canonical order.
    """
    rows = []
    replicate = 0
    for ctx in scenario.grid:
        try:
            identities = scenario.identity.identities(ctx)
        except RecordLabError as exc:
            rows.append(ResidualRow.failed(ctx, f"{type(exc).__name__}: {exc}", method=method,
                                           identity=scenario.identity.label))
            continue
        for identity in identities:
            rng = make_stream(seed, scenario.name, replicate) if method == MONTE_CARLO else None
            replicate += 1
            rows.append(evaluate(scenario.distribution, ctx, identity, method=method,
                                 rng=rng, n_draws=n_draws))
    report = summarize(scenario.name, rows, hold_tolerance, fail_floor, scenario.expected)
    logger.info("scenario %s: max |residual| %.3g, verdict %s (expected %s)",
                scenario.name, report.max_abs_residual, report.verdict, scenario.expected)
    return report


def expected_matches(report):
    """True when the report has no expectation or its verdict meets it."""
    return report.expected is None or report.verdict == report.expected


def transform_consistency(scenario):
    """Largest gap between the left sides computed under G and in T-space.

    Raises:
        ParamError: If the scenario has no transform or no mean form.
    """
    if scenario.transform is None or not isinstance(scenario.identity, MeanForm):
        raise ParamError(f"{scenario.name}: no transform to compare against")
    form = scenario.identity
    gaps = []
    for ctx in scenario.grid:
        direct = cond_expect_quadrature(scenario.distribution, ctx, form.g)
        tspace = conditional_moment_tspace(scenario.transform, ctx, form.phi)
        gaps.append(abs(direct - tspace))
    return max(gaps)


# --- Scenario constructors ---

def _edge_value(fn, x):
    with np.errstate(all="ignore"):
        return float(fn(np.float64(x)))


def _contexts(pairs, k, r=1):
    return tuple(ConditioningContext(k + 1, k, r, float(s), float(t)) for s, t in pairs)


def quantile_pairs(d, pairs=DEFAULT_QUANTILE_PAIRS):
    """Map quantile levels (q1, q2) to points (F^-1(q1), F^-1(q2))."""
    return [(float(d.quantile(q1)), float(d.quantile(q2))) for q1, q2 in pairs]


def _transform_scenario(name, kind, g, T, phi, rhs, k, c, lo, hi, tau, T_inverse, T_prime,
                        distribution, points, expected):
    if tau is None:
        tau = _edge_value(T, lo)
    transform = distributions.TransformFamily(T=T, tau=tau, c=c, lo=lo, hi=hi, T_inverse=T_inverse,
                                              T_prime=T_prime, name=kind)
    induced = distributions.from_transform(transform)
    law = distribution if distribution is not None else induced
    if points is None:
        points = quantile_pairs(law)
    form = MeanForm(kind, k, g, rhs, phi)
    return Scenario(name or kind, law, form, _contexts(points, k), expected,
                    transform if distribution is None else None)


def _require_positive_g(g, lo, hi, label):
    with np.errstate(all="ignore"):
        values = np.asarray(g(distributions.validation_grid(lo, hi)), dtype=float)
    if not np.all(values > 0):
        raise DomainError(f"{label}: g must be positive on ({lo}, {hi})")


def scenario_arithmetic_mean(g, k, c, *, lo=0.0, hi=math.inf, tau=None, g_inverse=None,
                             g_prime=None, distribution=None, points=None, name=None, expected=HOLDS):
    """E[g(Y(n)) | Y(n-k) = s, Y(n+1) = t] = (k g(t) + g(s)) / (k+1).

    Holds exactly when G(y) = 1 - exp(-c [g(y) - g(lo)]) with g increasing.

    Args:
        g (callable): Strictly increasing statistic on (lo, hi).
        k (int): Left gap.
        c (float): Rate of the induced law.
        lo (float): Left end of the support.
        hi (float): Right end of the support.
        tau (float, optional): g(lo+); evaluated when omitted.
        g_inverse (callable, optional): g^-1, for closed-form quantiles.
        g_prime (callable, optional): g'.
        distribution (DistributionModel, optional): Replaces the induced law,
            for a mismatch scenario.
        points (list, optional): (s, t) pairs; quantile pairs by default.
        name (str, optional): Scenario name.
        expected (str): 'holds' or 'fails'.

    Returns:
        Scenario: The scenario.

    Raises:
        NonMonotoneTransform: If g is not increasing.
    """
    def rhs(s, t):
        return (k * g(t) + g(s)) / (k + 1)

    return _transform_scenario(name, "arithmetic", g, g, lambda x: x, rhs, k, c, lo, hi, tau,
                               g_inverse, g_prime, distribution, points, expected)


def scenario_geometric_mean(g, k, c, *, lo=0.0, hi=math.inf, tau=None, g_inverse=None,
                            distribution=None, points=None, name=None, expected=HOLDS):
    """E[g(Y(n)) | Y(n-k) = s, Y(n+1) = t] = g(t)^(k/(k+1)) g(s)^(1/(k+1)).

    Holds exactly for T(y) = g(y)^(-1/(k+1)) with g positive and decreasing;
    in T-space the statistic is x^-(k+1), the k-th derivative of
    neg_reciprocal(k).

    Raises:
        DomainError: If g is not positive.
        NonMonotoneTransform: If g is not decreasing.
    """
    _require_positive_g(g, lo, hi, "geometric")
    exponent = -1.0 / (k + 1)

    def T(y):
        return np.asarray(g(y), dtype=float) ** exponent

    T_inverse = None
    if g_inverse is not None:
        def T_inverse(x):
            return g_inverse(np.asarray(x, dtype=float) ** -(k + 1))

    def rhs(s, t):
        return float(g(t)) ** (k / (k + 1)) * float(g(s)) ** (1.0 / (k + 1))

    return _transform_scenario(name, "geometric", g, T, lambda x: np.asarray(x, dtype=float) ** -(k + 1),
                               rhs, k, c, lo, hi, tau, T_inverse, None, distribution, points,
                               expected)


def scenario_harmonic_mean(g, c, *, lo=0.0, hi=math.inf, tau=None, g_inverse=None,
                           distribution=None, points=None, name=None, expected=HOLDS):
    """E[g(Y(n)) | Y(n-1) = s, Y(n+1) = t] = 2 g(s) g(t) / (g(s) + g(t)).

    Holds exactly for T(y) = g(y)^-2 with g positive and decreasing; h is
    2 sqrt(x), so the T-space statistic is x^(-1/2).
    """
    _require_positive_g(g, lo, hi, "harmonic")

    def T(y):
        return np.asarray(g(y), dtype=float) ** -2.0

    T_inverse = None
    if g_inverse is not None:
        def T_inverse(x):
            return g_inverse(np.asarray(x, dtype=float) ** -0.5)

    def rhs(s, t):
        gs, gt = float(g(s)), float(g(t))
        return 2.0 * gs * gt / (gs + gt)

    return _transform_scenario(name, "harmonic", g, T, lambda x: np.asarray(x, dtype=float) ** -0.5,
                               rhs, 1, c, lo, hi, tau, T_inverse, None, distribution, points,
                               expected)


def scenario_weibull_example(alpha, c, k, *, distribution=None, points=None, name=None,
                             expected=HOLDS):
    """Weibull records: E[Y(n)^(-alpha (k+1)) | Y(n-k) = s, Y(n+1) = t] = t^(-alpha k) s^(-alpha).

    Raises:
        ParamError: If alpha or c is not positive.
    """
    law = distributions.weibull(c, alpha)
    transform = distributions.TransformFamily(
        T=lambda y: np.asarray(y, dtype=float) ** alpha, tau=0.0, c=c,
        T_inverse=lambda x: np.asarray(x, dtype=float) ** (1.0 / alpha),
        T_prime=lambda y: alpha * np.asarray(y, dtype=float) ** (alpha - 1.0),
        name="weibull-example",
    )

    def g(y):
        return np.asarray(y, dtype=float) ** (-alpha * (k + 1))

    def rhs(s, t):
        return t ** (-alpha * k) * s ** -alpha

    form = MeanForm("weibull-example", k, g, rhs, lambda x: np.asarray(x, dtype=float) ** -(k + 1))
    target = distribution if distribution is not None else law
    if points is None:
        points = quantile_pairs(target)
    return Scenario(name or "weibull-example", target, form, _contexts(points, k), expected,
                    transform if distribution is None else None)


def scenario_pareto_example(a, c, k, *, distribution=None, points=None, name=None, expected=HOLDS):
    """Pareto records: E[(ln Y(n))^-(k+1) | Y(n-k) = s, Y(n+1) = t] = (ln t)^-k (ln s)^-1.

    The relation does not involve a.

    Raises:
        ParamError: If a or c is not positive.
        DomainError: If some s is not above max(a, 1).
    """
    law = distributions.pareto(a, c)
    transform = distributions.TransformFamily(
        T=lambda y: np.log(np.asarray(y, dtype=float)), tau=math.log(a), c=c, lo=a,
        T_inverse=np.exp, T_prime=lambda y: 1.0 / np.asarray(y, dtype=float),
        name="pareto-example",
    )

    def g(y):
        return np.log(np.asarray(y, dtype=float)) ** -(k + 1)

    def rhs(s, t):
        return math.log(t) ** -k / math.log(s)

    target = distribution if distribution is not None else law
    if points is None:
        points = quantile_pairs(target)
    for s, _ in points:
        if not s > max(a, 1.0):
            raise DomainError(f"pareto-example: need s > max(a, 1) = {max(a, 1.0)}, got {s}")
    form = MeanForm("pareto-example", k, g, rhs, lambda x: np.asarray(x, dtype=float) ** -(k + 1))
    return Scenario(name or "pareto-example", target, form, _contexts(points, k), expected,
                    transform if distribution is None else None)


def pareto_a_spread(c=1.0, k=1, s=6.0, t=10.0, a_values=(1.0, 2.0, 5.0)):
    """Largest difference between Pareto example residuals across scale parameters a."""
    residuals = []
    for a in a_values:
        report = run_scenario(scenario_pareto_example(a, c, k, points=[(s, t)]))
        residuals.append(report.rows[0].residual)
    return max(residuals) - min(residuals)


# --- Exponentiality diagnostic ---

@dataclass(frozen=True)
class GridSpec:
    """Quantile pairs crossed with (k, r) pairs."""
    quantile_pairs: tuple = DEFAULT_QUANTILE_PAIRS
    kr_pairs: tuple = DEFAULT_KR_PAIRS

    def contexts(self, d):
        """Contexts (k+1, k, r, F^-1(q1), F^-1(q2)); at least nine are required.

        Raises:
            ParamError: If fewer than nine contexts result.
        """
        grid = [ConditioningContext(k + 1, k, r, u, v)
                for u, v in quantile_pairs(d, self.quantile_pairs)
                for k, r in self.kr_pairs]
        if len(grid) < 9:
            raise ParamError(f"the diagnostic grid needs at least 9 contexts, got {len(grid)}")
        return tuple(grid)


def diagnose_exponentiality(d, grid_spec=None, hold_tolerance=HOLD_TOLERANCE, fail_floor=FAIL_FLOOR,
                            expected=None):
    """Check the record regression identity with h = power_normalized(k+r) across a grid.

    Residuals near zero everywhere point to a shifted exponential parent.

    Args:
        d (DistributionModel): The candidate distribution.
        grid_spec (GridSpec, optional): Grid parameters.
        hold_tolerance (float): Largest residual for `holds`.
        fail_floor (float): Residual above which the verdict is `fails`.
        expected (str, optional): Verdict the caller expects.

    Returns:
        ResidualReport: Verdict `holds`, `fails` or `inconclusive`.
    """
    grid_spec = grid_spec or GridSpec()
    scenario = Scenario(f"diagnose/{d.label}", d, power_family(), grid_spec.contexts(d), expected)
    return run_scenario(scenario, hold_tolerance, fail_floor)


# --- Registry ---

_CORE_PAIRS = ((0.5, 1.5), (1.0, 3.0), (1.0, 5.0))


def _cube(y):
    return np.asarray(y, dtype=float) ** 3


def _inverse_square(y):
    return np.asarray(y, dtype=float) ** -2.0


def _reciprocal(y):
    return 1.0 / np.asarray(y, dtype=float)


def _exponential_core():
    d = distributions.shifted_exponential(1.0, 0.0)
    grid = tuple(ConditioningContext(k + 1, k, r, u, v)
                 for u, v in _CORE_PAIRS for k in range(1, 5) for r in range(1, 5))
    return [Scenario("exponential-core", d, power_family((STANDARD, SHIFTED_PRIME)), grid)]


def _exponential_sweep():
    scenarios = []
    for c in (0.5, 1.0, 2.0):
        for l0 in (0.0, 1.0):
            d = distributions.shifted_exponential(c, l0)
            grid = tuple(ConditioningContext(k + 1, k, r, l0 + u, l0 + v)
                         for u, v in _CORE_PAIRS for k in range(1, 5) for r in range(1, 5))
            scenarios.append(Scenario(f"exponential-sweep/c={c:g},l0={l0:g}", d, power_family(), grid))
    return scenarios


def _mean_forms(kind, build, mismatch):
    return [build(k, None, f"{kind}-mean/k={k}", HOLDS) for k in (1, 2)] + \
        [build(k, mismatch, f"{kind}-mean-mismatch/k={k}", FAILS) for k in (1, 2)]


def _arithmetic():
    points = [(0.5, 1.5), (1.0, 2.0)]

    def build(k, law, name, expected):
        return scenario_arithmetic_mean(_cube, k, 1.0, g_inverse=np.cbrt,
                                        g_prime=lambda y: 3.0 * np.asarray(y, dtype=float) ** 2,
                                        distribution=law, points=points, name=name,
                                        expected=expected)
    return _mean_forms("arithmetic", build, distributions.weibull(1.0, 1.0))


def _geometric():
    points = [(0.5, 3.0), (1.0, 2.0)]

    def build(k, law, name, expected):
        return scenario_geometric_mean(_inverse_square, k, 1.0,
                                       g_inverse=lambda z: np.asarray(z, dtype=float) ** -0.5,
                                       distribution=law, points=points, name=name,
                                       expected=expected)
    return _mean_forms("geometric", build, distributions.weibull(1.0, 2.0))


def _harmonic():
    points = [(0.5, 2.0), (1.0, 3.0), (2.0, 5.0)]

    def build(law, name, expected):
        return scenario_harmonic_mean(_reciprocal, 1.0, g_inverse=_reciprocal, distribution=law,
                                      points=points, name=name, expected=expected)
    return [build(None, "harmonic-mean", HOLDS),
            build(distributions.weibull(1.0, 1.0), "harmonic-mean-mismatch", FAILS)]


def _weibull_example():
    points = [(1.2, 2.0), (1.5, 3.0)]
    mismatch = distributions.pareto(1.0, 2.0)
    return [scenario_weibull_example(2.0, 1.0, k, points=points, name=f"weibull-example/k={k}")
            for k in (1, 2)] + \
        [scenario_weibull_example(2.0, 1.0, k, distribution=mismatch, points=points,
                                  name=f"weibull-example-mismatch/k={k}", expected=FAILS)
         for k in (1, 2)]


def _pareto_example():
    points = [(math.e, math.e ** 2), (6.0, 10.0)]
    mismatch = distributions.uniform(1.0, 20.0)
    return [scenario_pareto_example(1.0, 1.0, k, points=points, name=f"pareto-example/k={k}")
            for k in (1, 2)] + \
        [scenario_pareto_example(1.0, 1.0, k, distribution=mismatch, points=points,
                                 name=f"pareto-example-mismatch/k={k}", expected=FAILS)
         for k in (1, 2)]


def _falsification(label, d):
    grid = GridSpec().contexts(d)
    return [Scenario(label, d, power_family(), grid, FAILS)]


REGISTRY = {
    "exponential-core": _exponential_core,
    "exponential-sweep": _exponential_sweep,
    "arithmetic-mean": _arithmetic,
    "geometric-mean": _geometric,
    "harmonic-mean": _harmonic,
    "weibull-example": _weibull_example,
    "pareto-example": _pareto_example,
    "uniform-falsification": lambda: _falsification("uniform-falsification",
                                                    distributions.uniform(0.0, 1.0)),
    "pareto-falsification": lambda: _falsification("pareto-falsification",
                                                   distributions.pareto(1.0, 2.0)),
}

MEAN_SCENARIOS = ("arithmetic-mean", "geometric-mean", "harmonic-mean")


def resolve_scenarios(names):
    """Expand registry names ('all' for everything) into scenarios sorted by name.

    Raises:
        ConfigError: On an unknown name.
    """
    keys = []
    for name in names:
        if name == "all":
            keys.extend(REGISTRY)
        elif name in REGISTRY:
            keys.append(name)
        else:
            raise ConfigError(f"unknown scenario {name!r}; choose from all, {', '.join(REGISTRY)}")
    scenarios = {}
    for key in dict.fromkeys(keys):
        for scenario in REGISTRY[key]():
            scenarios[scenario.name] = scenario
    return [scenarios[name] for name in sorted(scenarios)]
