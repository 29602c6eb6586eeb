"""Application factory and command-line entry point for RecordLab.

RecordLab checks the regression identities that characterize the shifted
exponential distribution through its upper record values. This module reads
the environment, builds the Flask application that carries configuration,
logging and the click commands, and exposes ``main`` for ``python app.py``.
"""

import os

import click
from dotenv import load_dotenv
from flask import Flask
from flask.cli import FlaskGroup

from .errors import ConfigError

load_dotenv()

SEED = os.getenv('RECORDLAB_SEED', '42')
HOLD_TOLERANCE = os.getenv('RECORDLAB_HOLD_TOLERANCE', '1e-6')
FAIL_FLOOR = os.getenv('RECORDLAB_FAIL_FLOOR', '1e-3')
MC_SAMPLES = os.getenv('RECORDLAB_MC_SAMPLES', '100000')
OUTPUT_FORMAT = os.getenv('RECORDLAB_OUTPUT_FORMAT', 'csv')
LOG_LEVEL = os.getenv('RECORDLAB_LOG_LEVEL', 'WARNING')

OUTPUT_FORMATS = ('csv', 'json')
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


def _number(key, value, kind):
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: {value!r} is not a valid {kind.__name__}") from None


def check_config(config):
    """Convert and validate the RecordLab settings in place.

    Raises:
        ConfigError: If a value is malformed or out of range.
    """
    config['SEED'] = _number('SEED', config['SEED'], int)
    if not 0 <= config['SEED'] < 2 ** 64:
        raise ConfigError(f"SEED must be an unsigned 64-bit integer, got {config['SEED']}")
    for key in ('HOLD_TOLERANCE', 'FAIL_FLOOR'):
        config[key] = _number(key, config[key], float)
        if not config[key] > 0:
            raise ConfigError(f"{key} must be positive, got {config[key]}")
    if config['HOLD_TOLERANCE'] > config['FAIL_FLOOR']:
        raise ConfigError("HOLD_TOLERANCE must not exceed FAIL_FLOOR")
    config['MC_SAMPLES'] = _number('MC_SAMPLES', config['MC_SAMPLES'], int)
    if config['MC_SAMPLES'] < 2:
        raise ConfigError(f"MC_SAMPLES must be >= 2, got {config['MC_SAMPLES']}")
    config['OUTPUT_FORMAT'] = str(config['OUTPUT_FORMAT']).lower()
    if config['OUTPUT_FORMAT'] not in OUTPUT_FORMATS:
        raise ConfigError(f"OUTPUT_FORMAT must be csv or json, got {config['OUTPUT_FORMAT']!r}")
    config['LOG_LEVEL'] = str(config['LOG_LEVEL']).upper()
    if config['LOG_LEVEL'] not in LOG_LEVELS:
        raise ConfigError(f"unknown LOG_LEVEL {config['LOG_LEVEL']!r}")


def create_app(test_config=None):
    """Create and configure the RecordLab application.

    Settings come from RECORDLAB_* environment variables (a .env file is
    honored), then from `test_config`.

    Args:
        test_config (dict, optional): Overrides applied after the environment.

    Returns:
        Flask: The configured application with the CLI commands registered.

    Raises:
        ConfigError: If a setting is malformed.
    """
    app = Flask(__name__)

    from .commands import commands  # pylint: disable=import-outside-toplevel

    app.config.update(
        SEED=SEED,
        HOLD_TOLERANCE=HOLD_TOLERANCE,
        FAIL_FLOOR=FAIL_FLOOR,
        MC_SAMPLES=MC_SAMPLES,
        OUTPUT_FORMAT=OUTPUT_FORMAT,
        LOG_LEVEL=LOG_LEVEL,
    )
    if test_config:
        app.config.update(test_config)
    check_config(app.config)

    # app.logger is the "recordlab" logger, parent of every module logger
    app.logger.setLevel(app.config['LOG_LEVEL'])

    app.register_blueprint(commands)
    return app


def main(argv=None):
    """Run a command and return its exit status; usage errors give 1."""
    cli = FlaskGroup(create_app=create_app, add_default_commands=False, add_version_option=False,
                     load_dotenv=False, help="Record-value regression identities toolkit.")
    try:
        return cli.main(args=argv, prog_name="recordlab", standalone_mode=False) or 0
    except click.ClickException as exc:
        exc.show()
        return 1
    except ConfigError as exc:
        click.echo(f"Error: {exc}", err=True)
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
