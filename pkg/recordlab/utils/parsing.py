"""Parsing of the short family strings used on the command line.

Distributions are written ``family:key=value,...``, e.g. ``exp:c=1,l0=0`` or
``uniform:a=0,b=1``. Generating functions are written ``power:5``,
``power:auto``, ``negrecip:2``, ``sqrt2`` or ``reciprocal``.
"""

from .. import distributions, kernel
from ..errors import ConfigError, RecordLabError

DIST_FAMILIES = {
    "exp": (distributions.shifted_exponential, {"c": 1.0, "l0": 0.0}),
    "weibull": (distributions.weibull, {"c": 1.0, "alpha": 1.0}),
    "pareto": (distributions.pareto, {"a": 1.0, "c": 1.0}),
    "uniform": (distributions.uniform, {"a": 0.0, "b": 1.0}),
    "invweibull": (distributions.inverse_weibull_corrected, {"c": 1.0}),
}


def parse_params(text):
    """Parse ``key=value,key=value`` into a dict of floats.

    Raises:
        ConfigError: On a malformed pair or a non-numeric value.
    """
    params = {}
    if not text.strip():
        return params
    for pair in text.split(","):
        key, sep, value = pair.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"expected key=value, got {pair!r}")
        try:
            params[key] = float(value)
        except ValueError:
            raise ConfigError(f"{key}: {value!r} is not a number") from None
    return params


def parse_dist_spec(text):
    """Build a DistributionModel from ``family:key=value,...``.

    Missing parameters take the family defaults (rate 1, origin 0, unit
    uniform).

    Args:
        text (str): The distribution string.

    Returns:
        DistributionModel: The distribution.

    Raises:
        ConfigError: On an unknown family, unknown key or invalid parameters.
    """
    family, _, rest = text.strip().partition(":")
    if family not in DIST_FAMILIES:
        raise ConfigError(f"unknown distribution family {family!r}; "
                          f"choose from {', '.join(sorted(DIST_FAMILIES))}")
    factory, defaults = DIST_FAMILIES[family]
    params = parse_params(rest)
    unknown = set(params) - set(defaults)
    if unknown:
        raise ConfigError(f"{family}: unknown parameter(s) {', '.join(sorted(unknown))}")
    try:
        return factory(**{**defaults, **params})
    except RecordLabError as exc:
        raise ConfigError(str(exc)) from exc


def _positive_int(text, what):
    try:
        value = int(text)
    except ValueError:
        raise ConfigError(f"{what}: {text!r} is not an integer") from None
    if value < 1:
        raise ConfigError(f"{what}: must be >= 1, got {value}")
    return value


def parse_h_spec(text, k, r):
    """Build the generating function h for gaps (k, r).

    ``power:auto`` means power_normalized(k+r); ``negrecip:auto`` means
    neg_reciprocal(k).

    Raises:
        ConfigError: On an unknown name or bad argument.
    """
    name, _, arg = text.strip().partition(":")
    if name == "power":
        return kernel.power_normalized(k + r if arg in ("", "auto") else _positive_int(arg, "power"))
    if name == "negrecip":
        return kernel.neg_reciprocal(k if arg in ("", "auto") else _positive_int(arg, "negrecip"))
    if name == "sqrt2" and not arg:
        return kernel.double_sqrt()
    if name == "reciprocal" and not arg:
        return kernel.plain_reciprocal()
    raise ConfigError(f"unknown generating function {text!r}; "
                      "use power:p, power:auto, negrecip:k, sqrt2 or reciprocal")


def split_list(text, convert=float, what="value"):
    """Split a comma-separated option value, e.g. ``1,2,3``."""
    items = [item.strip() for item in str(text).split(",") if item.strip()]
    try:
        return [convert(item) for item in items]
    except ValueError:
        raise ConfigError(f"{what}: cannot parse {text!r}") from None
