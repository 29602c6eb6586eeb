"""Unit tests for distribution models and transform families.

Tests check the closed forms against each other (cdf, hazard, quantile,
hazard inverse) and the validation paths.
"""
# pylint: disable=missing-function-docstring,line-too-long
import math

import numpy as np
import pytest
from scipy import stats

from recordlab import distributions
from recordlab.distributions import TransformFamily, from_transform
from recordlab.errors import NonMonotoneTransform, ParamError
from recordlab.quadrature import integrate


def models():
    return [
        distributions.shifted_exponential(2.0, 1.0),
        distributions.weibull(1.5, 2.0),
        distributions.pareto(1.0, 2.0),
        distributions.uniform(0.0, 1.0),
        distributions.inverse_weibull_corrected(1.0),
    ]


class TestDistributionModel:
    """Consistency of the closed forms of every family."""

    @pytest.mark.parametrize("d", models(), ids=lambda d: d.label)
    def test_quantile_inverts_cdf(self, d):
        p = np.array([0.05, 0.3, 0.5, 0.9])
        assert d.cdf(d.quantile(p)) == pytest.approx(p, rel=1e-10)

    @pytest.mark.parametrize("d", models(), ids=lambda d: d.label)
    def test_hazard_is_minus_log_survival(self, d):
        x = d.quantile(np.array([0.1, 0.4, 0.8]))
        assert d.hazard_R(x) == pytest.approx(-np.log1p(-d.cdf(x)), rel=1e-10)

    @pytest.mark.parametrize("d", models(), ids=lambda d: d.label)
    def test_hazard_inverse(self, d):
        gamma = np.array([0.1, 1.0, 3.0])
        assert d.hazard_R(d.from_hazard(gamma)) == pytest.approx(gamma, rel=1e-10)

    @pytest.mark.parametrize("d", models(), ids=lambda d: d.label)
    def test_hazard_derivative(self, d):
        x = float(d.quantile(0.5))
        step = 1e-6 * max(1.0, x)
        slope = (d.hazard_R(x + step) - d.hazard_R(x - step)) / (2 * step)
        assert d.hazard_R_prime(x) == pytest.approx(slope, rel=1e-6)
        assert d.pdf(x) == pytest.approx(d.hazard_R_prime(x) * (1 - d.cdf(x)), rel=1e-10)

    def test_cdf_outside_support(self):
        d = distributions.shifted_exponential(1.0, 2.0)
        assert d.cdf(1.0) == 0.0
        assert d.cdf(2.0) == 0.0
        u = distributions.uniform(0.0, 1.0)
        assert u.cdf(1.5) == 1.0

    def test_contains(self):
        d = distributions.pareto(2.0, 1.0)
        assert d.contains(3.0)
        assert not d.contains(2.0)

    def test_labels(self):
        assert distributions.shifted_exponential(1, 0).label == "exp:c=1,l0=0"
        assert distributions.uniform(0, 1).label == "uniform:a=0,b=1"

    @pytest.mark.parametrize("factory,args", [
        (distributions.shifted_exponential, (0.0, 0.0)),
        (distributions.shifted_exponential, (1.0, math.inf)),
        (distributions.weibull, (1.0, -2.0)),
        (distributions.pareto, (0.0, 1.0)),
        (distributions.uniform, (1.0, 1.0)),
        (distributions.inverse_weibull_corrected, (math.nan,)),
    ])
    def test_invalid_parameters(self, factory, args):
        with pytest.raises(ParamError):
            factory(*args)

    def test_inverse_weibull_is_increasing(self):
        d = distributions.inverse_weibull_corrected(1.0)
        values = d.cdf(np.array([0.1, 1.0, 10.0, 100.0]))
        assert np.all(np.diff(values) > 0)
        assert d.cdf(1.0) == pytest.approx(math.exp(-1.0))

    @pytest.mark.filterwarnings("error")
    def test_inverse_weibull_density_near_zero(self):
        d = distributions.inverse_weibull_corrected(1.0)
        tiny = np.array([1e-300, 1e-12])
        assert d.pdf(tiny) == pytest.approx([0.0, 0.0], abs=1e-300)
        assert d.hazard_R_prime(tiny) == pytest.approx([0.0, 0.0], abs=1e-300)
        assert d.hazard_R_prime(4.0) == pytest.approx(0.0625 / math.expm1(0.5), rel=1e-12)


class TestTransformFamily:
    """G(y) = 1 - exp(-c [T(y) - tau])."""

    def test_identity_transform_is_exponential(self):
        tf = TransformFamily(T=lambda y: np.asarray(y, dtype=float), tau=0.0, c=2.0)
        d = from_transform(tf)
        expo = distributions.shifted_exponential(2.0, 0.0)
        y = np.array([0.1, 0.7, 2.0])
        assert d.cdf(y) == pytest.approx(expo.cdf(y), rel=1e-12)
        assert d.hazard_R_prime(y) == pytest.approx(expo.hazard_R_prime(y), rel=1e-8)

    def test_bisection_quantile_and_hazard_inverse(self):
        tf = TransformFamily(T=lambda y: np.asarray(y, dtype=float) ** 3, tau=0.0, c=1.0)
        d = from_transform(tf)
        weib = distributions.weibull(1.0, 3.0)
        assert d.quantile(0.5) == pytest.approx(float(weib.quantile(0.5)), rel=1e-10)
        assert d.from_hazard(np.array([0.5, 2.0])) == pytest.approx(weib.from_hazard(np.array([0.5, 2.0])), rel=1e-10)

    def test_closed_form_inverse(self):
        tf = TransformFamily(T=np.log, tau=0.0, c=1.0, lo=1.0, T_inverse=np.exp)
        d = from_transform(tf)
        assert d.quantile(0.5) == pytest.approx(2.0)
        assert d.from_hazard(math.log(3.0)) == pytest.approx(3.0)

    def test_hazard_outside_support(self):
        tf = TransformFamily(T=np.log, tau=0.0, c=1.0, lo=1.0)
        d = from_transform(tf)
        assert d.hazard_R(0.5) == 0.0
        assert d.cdf(0.5) == 0.0

    def test_non_monotone_transform(self):
        with pytest.raises(NonMonotoneTransform):
            from_transform(TransformFamily(T=np.sin, tau=0.0, c=1.0))

    def test_tau_above_transform(self):
        with pytest.raises(ParamError):
            from_transform(TransformFamily(T=lambda y: np.asarray(y, dtype=float), tau=5.0, c=1.0))

    def test_bad_rate(self):
        with pytest.raises(ParamError):
            from_transform(TransformFamily(T=np.exp, tau=1.0, c=0.0))


def test_sample_shape_and_support(rng):
    d = distributions.pareto(1.0, 2.0)
    draws = distributions.sample(d, rng, 1000)
    assert draws.shape == (1000,)
    assert np.all(draws > 1.0)
    assert distributions.sample(d, rng, 0).shape == (0,)


def test_closed_form_examples():
    assert distributions.shifted_exponential(1.0, 0.0).hazard_R(2.0) == pytest.approx(2.0)
    assert distributions.shifted_exponential(2.0, 1.0).quantile(1 - math.exp(-2.0)) == pytest.approx(2.0)
    assert distributions.weibull(1.0, 2.0).hazard_R(3.0) == pytest.approx(9.0)
    assert distributions.weibull(2.0, 0.5).cdf(1.0) == pytest.approx(1 - math.exp(-2.0))
    assert distributions.pareto(1.0, 2.0).cdf(2.0) == pytest.approx(0.75)
    assert distributions.pareto(3.0, 1.0).hazard_R(3.0 * math.e) == pytest.approx(1.0)
    assert distributions.uniform(0.0, 1.0).hazard_R(0.5) == pytest.approx(math.log(2.0))


def test_weibull_shape_one_is_exponential():
    y = np.array([0.5, 1.0, 2.0])
    assert distributions.weibull(1.0, 1.0).cdf(y) == pytest.approx(distributions.shifted_exponential(1.0, 0.0).cdf(y), abs=1e-14)


@pytest.mark.parametrize("tf,closed", [
    (TransformFamily(T=lambda y: np.asarray(y, dtype=float) ** 2, tau=0.0, c=1.0), distributions.weibull(1.0, 2.0)),
    (TransformFamily(T=np.log, tau=math.log(3.0), c=2.0, lo=3.0), distributions.pareto(3.0, 2.0)),
], ids=["weibull", "pareto"])
def test_transforms_reproduce_closed_forms(tf, closed):
    d = from_transform(tf)
    y = closed.quantile(np.array([0.1, 0.5, 0.9]))
    assert d.cdf(y) == pytest.approx(closed.cdf(y), abs=1e-12)


@pytest.mark.parametrize("d", models(), ids=lambda d: d.label)
def test_pdf_integrates_to_cdf_mass(d):
    lo, hi = d.quantile(0.01), d.quantile(0.99)
    assert integrate(d.pdf, float(lo), float(hi)) == pytest.approx(0.98, abs=1e-8)


def test_sample_matches_law(rng):
    draws = distributions.sample(distributions.shifted_exponential(1.0, 0.0), rng, 10 ** 6)
    assert abs(draws.mean() - 1.0) < 4 * draws.std(ddof=1) / 1000
    uniform = distributions.uniform(0.0, 1.0)
    result = stats.kstest(distributions.sample(uniform, rng, 10 ** 5), uniform.cdf)
    assert result.statistic <= 1.95 / math.sqrt(10 ** 5)
