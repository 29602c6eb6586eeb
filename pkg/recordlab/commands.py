"""Command-line interface: verify, residual-grid, simulate, diagnose, means.

Commands are registered on the application's CLI through a blueprint, so
they run both as ``python app.py <command>`` and ``flask --app app <command>``.
Reports go to standard output or ``--out``; logs go to standard error.

Exit status: 0 when every verdict matches its expectation, 2 on a mismatch,
1 on usage or configuration errors.
"""

import functools

import click
from dotenv import dotenv_values
from flask import Blueprint, current_app

from . import reports, simulation, suite
from .errors import RecordLabError
from .records import ConditioningContext
from .regression import MONTE_CARLO, QUADRATURE, VARIANTS, RegressionIdentity
from .streams import SEED_MAX, make_stream
from .utils.parsing import parse_dist_spec, parse_h_spec, split_list

commands = Blueprint('commands', __name__, cli_group=None)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MISMATCH = 2

EMIT_CHOICES = ("summary", "paths")

CONFIG_NAMES = {"scenario": "scenarios", "k": "ks", "r": "rs", "u": "us", "v": "vs", "qu": "qus",
                "qv": "qvs", "h": "h_spec", "format": "output_format"}
METHOD_NAMES = {"quadrature": QUADRATURE, "mc": MONTE_CARLO}


def load_config_file(ctx, _param, path):
    """Eager --config callback: key=value lines become option defaults."""
    if not path:
        return path
    params = {param.name: param for param in ctx.command.params}
    values = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lower().replace("-", "_")
        name = CONFIG_NAMES.get(name, name) if CONFIG_NAMES.get(name) in params else name
        if name not in params or value is None:
            raise click.BadParameter(f"{key} is not a setting of this command", param_hint="--config")
        if getattr(params[name], "multiple", False):
            value = [item.strip() for item in value.split(",")]
        values[name] = value
    ctx.default_map = {**(ctx.default_map or {}), **values}
    return path


def config_option(f):
    return click.option("--config", type=click.Path(exists=True, dir_okay=False), is_eager=True,
                        expose_value=False, callback=load_config_file,
                        help="key=value file with option defaults.")(f)


def output_options(f):
    """--seed, --format and --out, shared by every command."""
    f = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                     help="Write the report here instead of standard output.")(f)
    f = click.option("--format", "output_format", type=click.Choice(["csv", "json"]), default=None,
                     help="Report format.")(f)
    f = click.option("--seed", type=click.IntRange(0, SEED_MAX), default=None,
                     help="Master seed of the random streams.")(f)
    return config_option(f)


def verdict_options(f):
    f = click.option("--fail-floor", type=click.FloatRange(min=0, min_open=True), default=None,
                     help="Residual above which a scenario fails.")(f)
    f = click.option("--tol", type=click.FloatRange(min=0, min_open=True), default=None,
                     help="Largest residual for which a scenario holds.")(f)
    return f


def reported_errors(f):
    """Turn library errors raised while setting up a command into usage errors (exit 1)."""
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except RecordLabError as exc:
            current_app.logger.error("%s: %s", type(exc).__name__, exc)
            raise click.ClickException(str(exc)) from exc
    return wrapper


def _settings(seed, output_format, tol=None, fail_floor=None, samples=None):
    config = current_app.config
    return {
        "seed": config['SEED'] if seed is None else seed,
        "format": config['OUTPUT_FORMAT'] if output_format is None else output_format,
        "tol": config['HOLD_TOLERANCE'] if tol is None else tol,
        "fail_floor": config['FAIL_FLOOR'] if fail_floor is None else fail_floor,
        "samples": config['MC_SAMPLES'] if samples is None else samples,
    }


def _flatten(values, convert, what):
    items = []
    for value in values:
        items.extend(split_list(value, convert, what))
    return items


def emit_text(text, out):
    """Write a finished report to `out` or standard output."""
    if out:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        current_app.logger.info("wrote %s", out)
    else:
        click.echo(text, nl=False)


def emit_reports(report_list, settings, out):
    if settings["format"] == "json":
        emit_text(reports.reports_to_json(report_list, settings["seed"]), out)
    else:
        emit_text(reports.reports_to_csv(report_list), out)


def exit_status(report_list):
    mismatched = [report.scenario for report in report_list if not suite.expected_matches(report)]
    for name in mismatched:
        current_app.logger.warning("scenario %s did not meet its expected verdict", name)
    return EXIT_MISMATCH if mismatched else EXIT_OK


def run_named(names, settings, method, out):
    scenarios = suite.resolve_scenarios(names)
    report_list = [suite.run_scenario(scenario, settings["tol"], settings["fail_floor"], method,
                                      settings["seed"], settings["samples"])
                   for scenario in scenarios]
    emit_reports(report_list, settings, out)
    return exit_status(report_list)


@commands.cli.command('verify')
@click.option("--scenario", "scenarios", multiple=True,
              help="Registry name (repeatable or comma-separated); 'all' runs everything.")
@click.option("--method", type=click.Choice(sorted(METHOD_NAMES)), default="quadrature")
@click.option("--samples", type=click.IntRange(min=2), default=None,
              help="Monte Carlo draws per row.")
@verdict_options
@output_options
@reported_errors
def verify(scenarios, method, samples, tol, fail_floor, seed, output_format, out):
    """Run named verification scenarios."""
    names = _flatten(scenarios, str, "scenario") or ["exponential-core"]
    settings = _settings(seed, output_format, tol, fail_floor, samples)
    current_app.logger.info("verify %s with seed %d", ",".join(names), settings["seed"])
    click.get_current_context().exit(run_named(names, settings, METHOD_NAMES[method], out))


@commands.cli.command('means')
@verdict_options
@output_options
@reported_errors
def means(tol, fail_floor, seed, output_format, out):
    """Run the arithmetic, geometric and harmonic mean scenarios."""
    settings = _settings(seed, output_format, tol, fail_floor)
    for scenario in suite.resolve_scenarios(suite.MEAN_SCENARIOS):
        if scenario.transform is not None:
            gap = suite.transform_consistency(scenario)
            current_app.logger.info("%s: direct and T-space left sides differ by %.3g",
                                    scenario.name, gap)
    click.get_current_context().exit(run_named(list(suite.MEAN_SCENARIOS), settings, QUADRATURE, out))


def _pairs(d, us, vs, qus, qvs):
    if len(us) != len(vs):
        raise click.UsageError("--u and --v must be given the same number of times")
    if len(qus) != len(qvs):
        raise click.UsageError("--qu and --qv must be given the same number of times")
    pairs = list(zip(us, vs))
    pairs += [(float(d.quantile(qu)), float(d.quantile(qv))) for qu, qv in zip(qus, qvs)]
    return pairs or suite.quantile_pairs(d)


@commands.cli.command('residual-grid')
@click.option("--dist", default="exp:c=1,l0=0", show_default=True, help="Distribution, family:key=value,...")
@click.option("--k", "ks", multiple=True, help="Left gap(s).")
@click.option("--r", "rs", multiple=True, help="Right gap(s).")
@click.option("--n", type=click.IntRange(min=2), default=None, help="Record index; k+1 by default.")
@click.option("--u", "us", multiple=True, help="Left conditioning point(s).")
@click.option("--v", "vs", multiple=True, help="Right conditioning point(s).")
@click.option("--qu", "qus", multiple=True, help="Left point(s) as quantile levels.")
@click.option("--qv", "qvs", multiple=True, help="Right point(s) as quantile levels.")
@click.option("--h", "h_spec", default="power:auto", show_default=True,
              help="power:p, power:auto, negrecip:k, sqrt2 or reciprocal.")
@click.option("--variant", type=click.Choice(VARIANTS), default="standard")
@click.option("--method", type=click.Choice(sorted(METHOD_NAMES)), default="quadrature")
@click.option("--samples", type=click.IntRange(min=2), default=None)
@verdict_options
@output_options
@reported_errors
def residual_grid(dist, ks, rs, n, us, vs, qus, qvs, h_spec, variant, method, samples, tol,
                  fail_floor, seed, output_format, out):
    """Tabulate residual rows of one identity over a grid of contexts."""
    settings = _settings(seed, output_format, tol, fail_floor, samples)
    d = parse_dist_spec(dist)
    ks = _flatten(ks, int, "k") or [1]
    rs = _flatten(rs, int, "r") or [1]
    pairs = _pairs(d, _flatten(us, float, "u"), _flatten(vs, float, "v"),
                   _flatten(qus, float, "qu"), _flatten(qvs, float, "qv"))
    method = METHOD_NAMES[method]
    rows = []
    replicate = 0
    for k in ks:
        for r in rs:
            identity = RegressionIdentity(parse_h_spec(h_spec, k, r), k, r, variant)
            for u, v in pairs:
                ctx = ConditioningContext(n if n is not None else k + 1, k, r, u, v)
                ctx.validate(d)
                rng = None
                if method == MONTE_CARLO:
                    rng = make_stream(settings["seed"], "residual-grid", replicate)
                    replicate += 1
                rows.append(suite.evaluate(d, ctx, identity, method=method, rng=rng,
                                           n_draws=settings["samples"]))
    report = suite.summarize("residual-grid", rows, settings["tol"], settings["fail_floor"])
    emit_reports([report], settings, out)
    click.get_current_context().exit(EXIT_OK)


@commands.cli.command('simulate')
@click.option("--mode", type=click.Choice(simulation.MODES), default=simulation.RECORDS_GAMMA,
              show_default=True)
@click.option("--dist", default="exp:c=1,l0=0", show_default=True)
@click.option("--n", type=click.IntRange(min=1), default=3, show_default=True,
              help="Records per path, or the record index for conditional draws.")
@click.option("--k", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--r", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--u", type=float, default=None)
@click.option("--v", type=float, default=None)
@click.option("--horizon", type=click.IntRange(1, 10 ** 7), default=1000, show_default=True,
              help="Stream length for records-stream.")
@click.option("--samples", type=click.IntRange(min=2), default=None,
              help="Replications or conditional draws.")
@click.option("--emit", type=click.Choice(EMIT_CHOICES), default="summary", show_default=True,
              help="Summary statistics, or every simulated record value and conditional draw.")
@output_options
@reported_errors
def simulate(mode, dist, n, k, r, u, v, horizon, samples, emit, seed, output_format, out):
    """Simulate record paths or conditional draws and summarize them."""
    settings = _settings(seed, output_format, samples=samples)
    d = parse_dist_spec(dist)
    seed, count = settings["seed"], settings["samples"]
    paths = emit == "paths"
    if mode == simulation.RECORDS_GAMMA:
        build = simulation.gamma_sample_rows if paths else simulation.simulate_records_gamma
        rows = build(d, seed, n, count)
    elif mode == simulation.RECORDS_STREAM:
        build = simulation.stream_sample_rows if paths else simulation.simulate_records_stream
        rows = build(d, seed, horizon, count, n)
    else:
        if u is None or v is None:
            raise click.UsageError("conditional mode needs --u and --v")
        ctx = ConditioningContext(max(n, k + 1), k, r, u, v)
        build = simulation.conditional_sample_rows if paths else simulation.simulate_conditional
        rows = build(d, ctx, seed, count)
    current_app.logger.info("simulate %s on %s: %d %s rows", mode, d.label, len(rows), emit)
    if settings["format"] == "json":
        to_json = reports.samples_to_json if paths else reports.summaries_to_json
        emit_text(to_json(rows, seed), out)
    else:
        to_csv = reports.samples_to_csv if paths else reports.summaries_to_csv
        emit_text(to_csv(rows), out)
    click.get_current_context().exit(EXIT_OK)


@commands.cli.command('diagnose')
@click.option("--dist", required=True, help="Distribution, family:key=value,...")
@click.option("--expect", type=click.Choice([suite.HOLDS, suite.FAILS]), default=None,
              help="Exit 2 unless the verdict is this.")
@verdict_options
@output_options
@reported_errors
def diagnose(dist, expect, tol, fail_floor, seed, output_format, out):
    """Check whether a distribution behaves like a shifted exponential."""
    settings = _settings(seed, output_format, tol, fail_floor)
    d = parse_dist_spec(dist)
    report = suite.diagnose_exponentiality(d, hold_tolerance=settings["tol"],
                                           fail_floor=settings["fail_floor"], expected=expect)
    current_app.logger.info("diagnose %s: %s", d.label, report.verdict)
    emit_reports([report], settings, out)
    click.get_current_context().exit(exit_status([report]))
