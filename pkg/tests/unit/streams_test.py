"""Unit tests for keyed random streams."""
# pylint: disable=missing-function-docstring
import numpy as np
import pytest

from recordlab.streams import SEED_MAX, make_stream, name_key, replicate_streams


def test_same_key_same_draws():
    assert np.array_equal(make_stream(42, "a", 3).random(5), make_stream(42, "a", 3).random(5))


@pytest.mark.parametrize("other", [(43, "a", 0), (42, "b", 0), (42, "a", 1)])
def test_different_keys_differ(other):
    assert not np.array_equal(make_stream(42, "a", 0).random(5), make_stream(*other).random(5))


def test_name_key_is_stable():
    assert name_key("exponential-core") == name_key("exponential-core")
    assert 0 <= name_key("x") < 2 ** 64


def test_seed_range():
    make_stream(SEED_MAX)
    with pytest.raises(ValueError):
        make_stream(-1)
    with pytest.raises(ValueError):
        make_stream(SEED_MAX + 1)
    with pytest.raises(ValueError):
        make_stream(1, "a", -1)


def test_replicate_streams():
    streams = replicate_streams(7, "task", 3)
    assert len(streams) == 3
    assert streams[2].random() == make_stream(7, "task", 2).random()
