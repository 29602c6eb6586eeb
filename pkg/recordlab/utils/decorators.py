"""Row-level error containment for grid evaluation.

A grid keeps going when one context fails numerically: the failing context
becomes a row carrying the error text and NaN values, and the run goes on.
"""

import logging
from functools import wraps

from ..errors import RecordLabError
from ..regression import QUADRATURE, ResidualRow

logger = logging.getLogger(__name__)


def row_guard(f):
    """Turn a RecordLabError raised while evaluating one row into an error row.

    The decorated function must take (d, ctx, identity, ...) and return a
    ResidualRow; `identity` needs a `label` attribute. Other exceptions
    propagate.

    Args:
        f (function): The row evaluator.

    Returns:
        function: Evaluator that never raises RecordLabError.
    """
    @wraps(f)
    def wrapper(d, ctx, identity, *args, **kwargs):
        try:
            return f(d, ctx, identity, *args, **kwargs)
        except RecordLabError as exc:
            message = f"{type(exc).__name__}: {exc}"
            logger.warning("row %s at %s failed: %s", identity.label, ctx, message)
            method = kwargs.get("method", QUADRATURE)
            return ResidualRow.failed(ctx, message, method=method, identity=identity.label)
    return wrapper
