"""Exception hierarchy for RecordLab.

Every error raised on purpose by the library derives from RecordLabError,
so grid runners and the CLI can tell a numeric failure in one context apart
from a programming error. Errors about bad input values also derive from
ValueError.
"""


class RecordLabError(Exception):
    """Base class for all RecordLab errors."""


class DomainError(RecordLabError, ValueError):
    """A point lies outside the domain of a function or distribution."""


class DiagonalTooClose(RecordLabError, ValueError):
    """The pair (u, v) is closer to the diagonal u = v than the threshold."""


class OrderTooHigh(RecordLabError, ValueError):
    """A derivative or factorial order exceeds what is available."""


class StencilCrossesDiagonal(RecordLabError, ValueError):
    """A finite-difference stencil would touch the diagonal u = v."""


class ParamError(RecordLabError, ValueError):
    """Invalid distribution or scenario parameters."""


class NonMonotoneTransform(RecordLabError, ValueError):
    """A transform T is not strictly increasing on its validation grid."""


class ContextError(RecordLabError, ValueError):
    """A conditioning context (n, k, r, u, v) is invalid for the model."""


class DegenerateHazard(RecordLabError, ArithmeticError):
    """R(v) - R(u) is too small to normalize the conditional density."""


class HorizonExhausted(RecordLabError, RuntimeError):
    """The i.i.d. stream ended before the requested record appeared."""


class QuadratureNonConvergence(RecordLabError, ArithmeticError):
    """Adaptive quadrature hit its depth limit without converging."""


class ConfigError(RecordLabError, ValueError):
    """Configuration values could not be parsed or are inconsistent."""
