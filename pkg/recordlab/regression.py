"""Both sides of the record regression identities and their residual.

For a shifted exponential parent, with m = k + r - 1,

    E[h^(m)(X(n)) | X(n-k) = u, X(n+r) = v]
        = (k+r-1)! / ((k-1)! (r-1)!) * (r-1)M(k-1)(u, v)

and the shifted form conditions on X(n-k+1) = u2 and uses M' built from h'.
The left side is integrated against the conditional density or estimated by
bridge sampling; the right side comes from the divided-difference kernel.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import numpy as np

from .distributions import shifted_exponential
from .errors import ContextError, ParamError
from .kernel import DerivableFunction, MixedDiffRequest, mixed_deriv
from .quadrature import integrate
from .records import beta_coefficient, density_on, sample_conditional

logger = logging.getLogger(__name__)

STANDARD = "standard"
SHIFTED_PRIME = "shifted_prime"
VARIANTS = (STANDARD, SHIFTED_PRIME)

QUADRATURE = "quadrature"
MONTE_CARLO = "monte_carlo"
METHODS = (QUADRATURE, MONTE_CARLO)

RELATIVE_FLOOR = 1e-6


@dataclass(frozen=True)
class RegressionIdentity:
    """E[h^(k+r-1)(X(n)) | ...] against the divided-difference closed form.

    Attributes:
        h (DerivableFunction): The generating function.
        k (int): Left gap, >= 1 (>= 2 for the shifted form).
        r (int): Right gap, >= 1.
        variant (str): 'standard' or 'shifted_prime'.
        coefficient (Fraction): (k+r-1)! / ((k-1)! (r-1)!), exact.
    """
    h: DerivableFunction
    k: int
    r: int
    variant: str = STANDARD
    coefficient: Fraction = field(init=False)

    def __post_init__(self):
        if self.k < 1 or self.r < 1:
            raise ParamError(f"gaps must be >= 1, got k={self.k}, r={self.r}")
        if self.variant not in VARIANTS:
            raise ParamError(f"unknown identity variant {self.variant!r}")
        if self.variant == SHIFTED_PRIME and self.k < 2:
            raise ParamError("the shifted identity needs k >= 2")
        object.__setattr__(self, "coefficient", Fraction(beta_coefficient(self.k, self.r)))

    @property
    def label(self):
        return self.variant

    @property
    def order(self):
        """Derivative order of h averaged on the left side."""
        return self.k + self.r - 1

    def statistic(self, t):
        """g(t) = h^(k+r-1)(t)."""
        return self.h.deriv(self.order, t)

    def effective_context(self, ctx):
        """Context actually conditioned on; the shifted form has inner gap k-1."""
        if (ctx.k, ctx.r) != (self.k, self.r):
            raise ContextError(
                f"context gaps ({ctx.k}, {ctx.r}) do not match identity gaps ({self.k}, {self.r})"
            )
        if self.variant == SHIFTED_PRIME:
            return ctx.with_gap(ctx.k - 1)
        return ctx


@dataclass(frozen=True)
class ResidualRow:
    """One evaluated identity at one context."""
    ctx: object
    lhs: float
    rhs: float
    residual: float
    method: str = QUADRATURE
    mc_std_error: Optional[float] = None
    identity: str = STANDARD
    relative_residual: Optional[float] = None
    error: Optional[str] = None

    @classmethod
    def build(cls, ctx, lhs, rhs, method=QUADRATURE, identity=STANDARD, mc_std_error=None):
        residual = lhs - rhs
        relative = residual / abs(rhs) if abs(rhs) > RELATIVE_FLOOR else None
        return cls(ctx, lhs, rhs, residual, method, mc_std_error, identity, relative)

    @classmethod
    def failed(cls, ctx, error, method=QUADRATURE, identity=STANDARD):
        """A row whose evaluation raised; values are NaN."""
        nan = float("nan")
        return cls(ctx, nan, nan, nan, method, None, identity, None, error)

    @property
    def ok(self):
        return self.error is None and math.isfinite(self.residual)


def cond_expect_quadrature(d, ctx, g):
    """E[g(X(n)) | X(n-k) = u, X(n+r) = v] by adaptive Gauss-Legendre quadrature.

    Args:
        d (DistributionModel): The parent distribution.
        ctx (ConditioningContext): The conditioning event.
        g (callable): Vectorized statistic, continuous on [u, v].

    Returns:
        float: The conditional expectation.

    Raises:
        ContextError: If ctx is invalid for d.
        QuadratureNonConvergence: If the integral does not settle.
    """
    density = density_on(d, ctx)
    return integrate(lambda t: np.asarray(g(t), dtype=float) * density(t), ctx.u, ctx.v)


def cond_expect_mc(d, ctx, g, rng, n_draws):
    """Monte Carlo mean and standard error of g(X(n)) over bridge samples.

    Returns:
        tuple: (mean, std_error).
    """
    if n_draws < 2:
        raise ValueError(f"n_draws must be >= 2, got {n_draws}")
    draws = sample_conditional(d, ctx, rng, size=n_draws)
    values = np.broadcast_to(np.asarray(g(draws), dtype=float), draws.shape)
    mean = float(np.mean(values))
    std_error = float(np.std(values, ddof=1) / math.sqrt(n_draws))
    return mean, std_error


def closed_form_rhs(ident, u, v):
    """Right side of the identity at (u, v).

    standard: coefficient * (r-1)M(k-1)(u, v) of h.
    shifted_prime: (k+r-2)! / ((k-2)! (r-1)!) * (r-1)M'(k-2)(u, v), M' built from h'.

    Raises:
        DiagonalTooClose: If u and v are too close.
        OrderTooHigh: If the orders exceed what h provides.
    """
    if ident.variant == SHIFTED_PRIME:
        coefficient = beta_coefficient(ident.k - 1, ident.r)
        kernel = mixed_deriv(ident.h.derivative(), MixedDiffRequest(ident.r - 1, ident.k - 2, u, v))
        return float(coefficient * kernel)
    kernel = mixed_deriv(ident.h, MixedDiffRequest(ident.r - 1, ident.k - 1, u, v))
    return float(ident.coefficient) * kernel


def residual(d, ctx, ident, method=QUADRATURE, rng=None, n_draws=None):
    """Evaluate both sides of `ident` at `ctx` and return their difference.

    For the shifted form, ctx.u is the left point X(n-k+1) and the
    conditioning is done with inner gap k-1.

    Args:
        d (DistributionModel): The parent distribution.
        ctx (ConditioningContext): Context with the identity's (k, r).
        ident (RegressionIdentity): The identity.
        method (str): 'quadrature' or 'monte_carlo'.
        rng (numpy.random.Generator, optional): Required for Monte Carlo.
        n_draws (int, optional): Monte Carlo sample size.

    Returns:
        ResidualRow: lhs, rhs and lhs - rhs.
    """
    effective = ident.effective_context(ctx)
    rhs = closed_form_rhs(ident, ctx.u, ctx.v)
    if method == MONTE_CARLO:
        if rng is None or n_draws is None:
            raise ValueError("Monte Carlo needs rng and n_draws")
        lhs, std_error = cond_expect_mc(d, effective, ident.statistic, rng, n_draws)
        return ResidualRow.build(ctx, lhs, rhs, MONTE_CARLO, ident.label, std_error)
    if method != QUADRATURE:
        raise ValueError(f"unknown method {method!r}")
    lhs = cond_expect_quadrature(d, effective, ident.statistic)
    return ResidualRow.build(ctx, lhs, rhs, QUADRATURE, ident.label)


def conditional_moment_tspace(tf, ctx, phi):
    """E[g(Y(n)) | Y(n-k) = s, Y(n+r) = t] computed from the records of T(Y).

    T(Y(1)), T(Y(2)), ... are records of a shifted exponential with rate c and
    origin tau, so the expectation of g = phi(T) is taken under that law at
    (T(s), T(t)).

    Args:
        tf (TransformFamily): The transform family of Y.
        ctx (ConditioningContext): Context in the original scale.
        phi (callable): The statistic expressed in T-space.

    Returns:
        float: The conditional expectation.
    """
    base = shifted_exponential(tf.c, tf.tau)
    mapped = replace(ctx, u=float(tf.T(ctx.u)), v=float(tf.T(ctx.v)))
    return cond_expect_quadrature(base, mapped, phi)
