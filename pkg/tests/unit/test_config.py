"""
Unit tests for the application factory and its settings.
"""
# pylint: disable=missing-function-docstring
import pytest

from recordlab import create_app
from recordlab.errors import ConfigError


def test_defaults_are_converted():
    app = create_app({'TESTING': True})
    assert isinstance(app.config['SEED'], int)
    assert isinstance(app.config['HOLD_TOLERANCE'], float)
    assert app.config['OUTPUT_FORMAT'] in ('csv', 'json')


def test_overrides(app):
    assert app.config['SEED'] == 42
    assert app.config['MC_SAMPLES'] == 20000
    assert app.logger.name == 'recordlab'


def test_commands_registered(app):
    assert {'verify', 'means', 'residual-grid', 'simulate', 'diagnose'} <= set(app.cli.commands)


@pytest.mark.parametrize("overrides", [
    {'SEED': 'abc'},
    {'SEED': -1},
    {'HOLD_TOLERANCE': 0},
    {'HOLD_TOLERANCE': 1e-2, 'FAIL_FLOOR': 1e-3},
    {'MC_SAMPLES': 1},
    {'OUTPUT_FORMAT': 'xml'},
    {'LOG_LEVEL': 'LOUD'},
])
def test_invalid_settings(overrides):
    with pytest.raises(ConfigError):
        create_app(overrides)


def test_case_is_normalized():
    app = create_app({'OUTPUT_FORMAT': 'JSON', 'LOG_LEVEL': 'debug'})
    assert app.config['OUTPUT_FORMAT'] == 'json'
    assert app.logger.level == 10
