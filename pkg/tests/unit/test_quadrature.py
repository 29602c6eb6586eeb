"""
Unit tests for adaptive Gauss-Legendre quadrature (recordlab.quadrature).
"""
# pylint: disable=missing-function-docstring
import math

import numpy as np
import pytest

from recordlab.errors import QuadratureNonConvergence
from recordlab.quadrature import gauss_legendre, integrate, legendre_rule


def test_rule_integrates_polynomials_exactly():
    nodes, weights = legendre_rule(15)
    assert nodes.shape == weights.shape == (15,)
    assert weights.sum() == pytest.approx(2.0, rel=1e-14)
    assert gauss_legendre(lambda x: x ** 28, -1.0, 1.0) == pytest.approx(2.0 / 29, rel=1e-12)


def test_smooth_integrals():
    assert integrate(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-13)
    assert integrate(np.exp, 0.0, 1.0) == pytest.approx(math.e - 1.0, rel=1e-13)
    assert integrate(lambda x: 1.0 / x, 1.0, 10.0) == pytest.approx(math.log(10.0), rel=1e-12)


def test_constant_integrand():
    assert integrate(lambda x: 3.0, 1.0, 2.0) == pytest.approx(3.0)


def test_empty_and_reversed_intervals():
    assert integrate(np.exp, 1.0, 1.0) == 0.0
    assert integrate(np.exp, 1.0, 0.0) == pytest.approx(1.0 - math.e, rel=1e-13)


def test_infinite_limits_rejected():
    with pytest.raises(ValueError):
        integrate(np.exp, 0.0, math.inf)


def test_depth_limit():
    with pytest.raises(QuadratureNonConvergence):
        integrate(lambda x: np.where(x < 1.0 / 3.0, 0.0, 1.0), 0.0, 1.0, max_depth=8)
