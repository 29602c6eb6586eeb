"""
Unit tests for the command-line family strings (recordlab.utils.parsing).
"""
# pylint: disable=missing-function-docstring
import pytest

from recordlab.errors import ConfigError
from recordlab.utils.parsing import parse_dist_spec, parse_h_spec, parse_params, split_list


def test_parse_params():
    assert parse_params("c=2, l0=0.5") == {"c": 2.0, "l0": 0.5}
    assert not parse_params("")


@pytest.mark.parametrize("text", ["c", "=1", "c=x"])
def test_parse_params_rejects(text):
    with pytest.raises(ConfigError):
        parse_params(text)


@pytest.mark.parametrize("text,label", [
    ("exp:c=1,l0=0", "exp:c=1,l0=0"),
    ("exp", "exp:c=1,l0=0"),
    ("uniform:b=2", "uniform:a=0,b=2"),
    ("weibull:alpha=2", "weibull:c=1,alpha=2"),
    ("pareto:a=1,c=2", "pareto:a=1,c=2"),
])
def test_parse_dist_spec(text, label):
    assert parse_dist_spec(text).label == label


@pytest.mark.parametrize("text", ["gamma:k=2", "exp:rate=1", "uniform:a=1,b=0", "exp:c=-1"])
def test_parse_dist_spec_rejects(text):
    with pytest.raises(ConfigError):
        parse_dist_spec(text)


def test_parse_h_spec():
    assert parse_h_spec("power:auto", 2, 3).name == parse_h_spec("power:5", 1, 1).name
    assert parse_h_spec("negrecip", 3, 1).deriv(3, 1.0) == pytest.approx(1.0)
    assert parse_h_spec("sqrt2", 1, 1).deriv(1, 4.0) == pytest.approx(0.5)
    assert parse_h_spec("reciprocal", 1, 1).deriv(1, 2.0) == pytest.approx(0.25)


@pytest.mark.parametrize("text", ["cosh", "power:0", "power:x", "sqrt2:3"])
def test_parse_h_spec_rejects(text):
    with pytest.raises(ConfigError):
        parse_h_spec(text, 1, 1)


def test_split_list():
    assert split_list("1, 2,3", int) == [1, 2, 3]
    assert not split_list("", float)
    with pytest.raises(ConfigError):
        split_list("1,a", int, "k")
