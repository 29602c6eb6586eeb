"""Absolutely continuous distributions described through their hazard transform.

Every model carries F, f, the quantile, R(x) = -ln(1 - F(x)) and R'(x), the
open support (l_F, r_F), and R^-1. All callables accept floats and numpy
arrays. The cdf is exactly 0 at or below the left end of the support and
exactly 1 at or above the right end.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from .errors import NonMonotoneTransform, ParamError
from .kernel import fd_step

logger = logging.getLogger(__name__)

BISECT_XTOL = 1e-12
BISECT_MAXITER = 200


def _arr(x):
    return np.asarray(x, dtype=float)


def _label(family, **params):
    return family + ":" + ",".join(f"{key}={value:g}" for key, value in params.items())


def _require_positive(family, **params):
    for key, value in params.items():
        if not value > 0 or not math.isfinite(value):
            raise ParamError(f"{family}: {key} must be a positive finite number, got {value}")


@dataclass(frozen=True)
class DistributionModel:
    """A distribution F given by its cdf, density, quantile and hazard transform.

    Attributes:
        label (str): Family tag with parameters, e.g. ``exp:c=1,l0=0``.
        cdf (callable): F.
        pdf (callable): f.
        quantile (callable): F^-1 on (0, 1).
        hazard_R (callable): R(x) = -ln(1 - F(x)).
        hazard_R_prime (callable): R'(x) = f(x) / (1 - F(x)).
        support_lo (float): l_F, may be -inf.
        support_hi (float): r_F, may be +inf.
        hazard_inverse (callable, optional): R^-1. Falls back to the
            quantile of 1 - exp(-gamma) when absent.
        params (dict): Family parameters, for reports.
    """
    label: str
    cdf: Callable
    pdf: Callable
    quantile: Callable
    hazard_R: Callable
    hazard_R_prime: Callable
    support_lo: float
    support_hi: float
    hazard_inverse: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    def contains(self, x):
        """True when x lies in the open support."""
        return self.support_lo < x < self.support_hi

    def from_hazard(self, gamma):
        """Map hazard-space values back: x with R(x) = gamma."""
        if self.hazard_inverse is not None:
            return self.hazard_inverse(gamma)
        return self.quantile(-np.expm1(-_arr(gamma)))


def shifted_exponential(c, l0):
    """F(x) = 1 - exp(-c (x - l0)) on (l0, inf).

    Raises:
        ParamError: If c <= 0 or l0 is not finite.
    """
    _require_positive("exp", c=c)
    if not math.isfinite(l0):
        raise ParamError(f"exp: l0 must be finite, got {l0}")

    def hazard(x):
        x = _arr(x)
        return c * np.where(x > l0, x - l0, 0.0)

    def hazard_prime(x):
        return np.where(_arr(x) > l0, c, 0.0)[()]

    return DistributionModel(
        label=_label("exp", c=c, l0=l0),
        cdf=lambda x: -np.expm1(-hazard(x)),
        pdf=lambda x: hazard_prime(x) * np.exp(-hazard(x)),
        quantile=lambda p: l0 - np.log1p(-_arr(p)) / c,
        hazard_R=hazard,
        hazard_R_prime=hazard_prime,
        support_lo=float(l0),
        support_hi=math.inf,
        hazard_inverse=lambda g: l0 + _arr(g) / c,
        params={"c": c, "l0": l0},
    )


def weibull(c, alpha):
    """G(y) = 1 - exp(-c y^alpha) on (0, inf)."""
    _require_positive("weibull", c=c, alpha=alpha)

    def hazard(y):
        y = _arr(y)
        return c * np.where(y > 0, y, 0.0) ** alpha

    def hazard_prime(y):
        y = _arr(y)
        inside = y > 0
        with np.errstate(divide="ignore"):
            return np.where(inside, c * alpha * np.where(inside, y, 1.0) ** (alpha - 1), 0.0)[()]

    return DistributionModel(
        label=_label("weibull", c=c, alpha=alpha),
        cdf=lambda y: -np.expm1(-hazard(y)),
        pdf=lambda y: hazard_prime(y) * np.exp(-hazard(y)),
        quantile=lambda p: (-np.log1p(-_arr(p)) / c) ** (1.0 / alpha),
        hazard_R=hazard,
        hazard_R_prime=hazard_prime,
        support_lo=0.0,
        support_hi=math.inf,
        hazard_inverse=lambda g: (_arr(g) / c) ** (1.0 / alpha),
        params={"c": c, "alpha": alpha},
    )


def pareto(a, c):
    """G(y) = 1 - (a / y)^c on (a, inf)."""
    _require_positive("pareto", a=a, c=c)

    def hazard(y):
        return c * np.log(np.maximum(_arr(y), a) / a)

    def hazard_prime(y):
        y = _arr(y)
        return np.where(y > a, c / np.maximum(y, a), 0.0)[()]

    return DistributionModel(
        label=_label("pareto", a=a, c=c),
        cdf=lambda y: -np.expm1(-hazard(y)),
        pdf=lambda y: hazard_prime(y) * np.exp(-hazard(y)),
        quantile=lambda p: a * np.exp(-np.log1p(-_arr(p)) / c),
        hazard_R=hazard,
        hazard_R_prime=hazard_prime,
        support_lo=float(a),
        support_hi=math.inf,
        hazard_inverse=lambda g: a * np.exp(_arr(g) / c),
        params={"a": a, "c": c},
    )


def uniform(a, b):
    """F linear on (a, b); R(x) = -ln((b - x) / (b - a))."""
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ParamError(f"uniform: need finite a < b, got a={a}, b={b}")
    width = b - a

    def cdf(x):
        return np.clip((_arr(x) - a) / width, 0.0, 1.0)

    def hazard(x):
        with np.errstate(divide="ignore"):
            return -np.log1p(-cdf(x))

    def hazard_prime(x):
        x = _arr(x)
        with np.errstate(divide="ignore"):
            inner = 1.0 / np.where(x < b, b - x, 0.0)
        return np.where(x > a, inner, 0.0)[()]

    return DistributionModel(
        label=_label("uniform", a=a, b=b),
        cdf=cdf,
        pdf=lambda x: np.where((_arr(x) > a) & (_arr(x) < b), 1.0 / width, 0.0)[()],
        quantile=lambda p: a + _arr(p) * width,
        hazard_R=hazard,
        hazard_R_prime=hazard_prime,
        support_lo=float(a),
        support_hi=float(b),
        hazard_inverse=lambda g: b - width * np.exp(-_arr(g)),
        params={"a": a, "b": b},
    )


def inverse_weibull_corrected(c):
    """G(y) = exp(-c y^(-1/2)) on (0, inf).

    Printed in the literature as exp{-c y^(1/2)}, which decreases in y and is
    not a distribution function; this is the increasing form.
    """
    _require_positive("invweibull", c=c)

    def _scaled(y):
        y = _arr(y)
        return np.where(y > 0, c / np.sqrt(np.where(y > 0, y, 1.0)), np.inf)

    def cdf(y):
        return np.exp(-_scaled(y))

    def hazard(y):
        with np.errstate(divide="ignore"):
            return -np.log(-np.expm1(-_scaled(y)))

    def _density(safe, z):
        # (c/2) y^-1.5 exp(-z) in log form: y^-1.5 alone overflows near 0
        return 0.5 * c * np.exp(-z - 1.5 * np.log(safe))

    def pdf(y):
        y = _arr(y)
        inside = y > 0
        safe = np.where(inside, y, 1.0)
        return np.where(inside, _density(safe, c / np.sqrt(safe)), 0.0)[()]

    def hazard_prime(y):
        y = _arr(y)
        inside = y > 0
        safe = np.where(inside, y, 1.0)
        z = c / np.sqrt(safe)
        # f / (1 - F) = (c/2) y^-1.5 / (exp(z) - 1)
        return np.where(inside, _density(safe, z) / -np.expm1(-z), 0.0)[()]

    return DistributionModel(
        label=_label("inverse_weibull_corrected", c=c),
        cdf=cdf,
        pdf=pdf,
        quantile=lambda p: (c / -np.log(_arr(p))) ** 2,
        hazard_R=hazard,
        hazard_R_prime=hazard_prime,
        support_lo=0.0,
        support_hi=math.inf,
        hazard_inverse=lambda g: (c / -np.log1p(-np.exp(-_arr(g)))) ** 2,
        params={"c": c},
    )


# --- Transform families ---

def validation_grid(lo, hi, size=64):
    """Points strictly inside (lo, hi), spread over several scales."""
    if math.isfinite(lo) and math.isfinite(hi):
        return lo + (hi - lo) * np.linspace(0.005, 0.995, size)
    if math.isfinite(lo):
        return lo + max(1.0, abs(lo)) * np.geomspace(1e-3, 1e3, size)
    if math.isfinite(hi):
        return hi - max(1.0, abs(hi)) * np.geomspace(1e3, 1e-3, size)
    return np.sinh(np.linspace(-7.0, 7.0, size))


@dataclass(frozen=True)
class TransformFamily:
    """G(y) = 1 - exp(-c [T(y) - tau]) on (lo, hi) for increasing T.

    Attributes:
        T (callable): Strictly increasing transform on (lo, hi).
        tau (float): T(lo+), finite.
        c (float): Positive rate.
        lo (float): l_G.
        hi (float): r_G; T must tend to infinity there.
        T_inverse (callable, optional): T^-1, enables closed-form quantiles.
        T_prime (callable, optional): T'; central differences otherwise.
        name (str): Label for reports.
    """
    T: Callable
    tau: float
    c: float
    lo: float = 0.0
    hi: float = math.inf
    T_inverse: Optional[Callable] = None
    T_prime: Optional[Callable] = None
    name: str = "transform"

    def validate(self):
        """Check parameters and monotonicity of T on a validation grid.

        Raises:
            ParamError: If c <= 0, tau is not finite, lo >= hi, or T dips
                below tau.
            NonMonotoneTransform: If T is not strictly increasing on the grid.
        """
        _require_positive(self.name, c=self.c)
        if not math.isfinite(self.tau):
            raise ParamError(f"{self.name}: tau must be finite, got {self.tau}")
        if not self.lo < self.hi:
            raise ParamError(f"{self.name}: need lo < hi, got ({self.lo}, {self.hi})")
        grid = validation_grid(self.lo, self.hi)
        with np.errstate(all="ignore"):
            values = _arr(self.T(grid))
        if not np.all(np.isfinite(values)) or not np.all(np.diff(values) > 0):
            raise NonMonotoneTransform(f"{self.name}: T is not strictly increasing on ({self.lo}, {self.hi})")
        if values[0] < self.tau - 1e-12 * max(1.0, abs(self.tau)):
            raise ParamError(f"{self.name}: T({grid[0]:g}) = {values[0]:g} lies below tau = {self.tau:g}")


def _solve_increasing(fn, target, lo, hi, start):
    """Scalar root of fn(y) = target for increasing fn on (lo, hi)."""
    left = lo if math.isfinite(lo) else start - 1.0
    while not math.isfinite(lo) and fn(left) > target:
        left = start - 2.0 * (start - left)
    right = hi if math.isfinite(hi) else max(start, left) + 1.0
    while not math.isfinite(hi) and fn(right) < target:
        right = left + 2.0 * (right - left)
    return optimize.bisect(lambda y: fn(y) - target, left, right,
                           xtol=BISECT_XTOL, maxiter=BISECT_MAXITER)


def from_transform(tf):
    """Build G(y) = 1 - exp(-c [T(y) - tau]) from a transform family.

    Args:
        tf (TransformFamily): The transform, rate and support.

    Returns:
        DistributionModel: The induced distribution.

    Raises:
        ParamError: If the family parameters are invalid.
        NonMonotoneTransform: If T is not strictly increasing.
    """
    tf.validate()
    lo, hi, c, tau = tf.lo, tf.hi, tf.c, tf.tau
    interior = float(np.median(validation_grid(lo, hi)))

    def _inside(y):
        y = _arr(y)
        inside = (y > lo) & (y < hi)
        return y, inside, np.where(inside, y, interior)

    def hazard(y):
        y, inside, safe = _inside(y)
        return np.where(inside, c * (_arr(tf.T(safe)) - tau), np.where(y >= hi, np.inf, 0.0))[()]

    def t_prime(safe):
        if tf.T_prime is not None:
            return _arr(tf.T_prime(safe))
        step = np.minimum(fd_step(1, safe), 0.5 * np.minimum(safe - lo, hi - safe))
        return (_arr(tf.T(safe + step)) - _arr(tf.T(safe - step))) / (2.0 * step)

    def hazard_prime(y):
        _, inside, safe = _inside(y)
        return np.where(inside, c * t_prime(safe), 0.0)[()]

    def cdf(y):
        return -np.expm1(-hazard(y))

    def quantile(p):
        p = _arr(p)
        if tf.T_inverse is not None:
            return _arr(tf.T_inverse(tau - np.log1p(-p) / c))[()]

        def one(prob):
            if prob <= 0.0:
                return lo
            if prob >= 1.0:
                return hi
            return _solve_increasing(lambda y: float(cdf(y)), prob, lo, hi, interior)

        if p.ndim == 0:
            return one(float(p))

        return np.vectorize(one, otypes=[float])(p)[()]

    def hazard_inverse(gamma):
        gamma = _arr(gamma)
        if tf.T_inverse is not None:
            return _arr(tf.T_inverse(tau + gamma / c))[()]

        def one(g):
            if g <= 0.0:
                return lo
            return _solve_increasing(lambda y: float(hazard(y)), g, lo, hi, interior)

        return np.vectorize(one, otypes=[float])(gamma)[()]

    logger.debug("built transform family %s on (%g, %g)", tf.name, lo, hi)
    return DistributionModel(
        label=_label(tf.name, c=c, tau=tau),
        cdf=cdf,
        pdf=lambda y: hazard_prime(y) * np.exp(-hazard(y)),
        quantile=quantile,
        hazard_R=hazard,
        hazard_R_prime=hazard_prime,
        support_lo=float(lo),
        support_hi=float(hi),
        hazard_inverse=hazard_inverse,
        params={"c": c, "tau": tau},
    )


def sample(d, rng, count):
    """Draw `count` i.i.d. values from d by inverse-transform sampling.

    Args:
        d (DistributionModel): The distribution.
        rng (numpy.random.Generator): Random stream.
        count (int): Number of draws, >= 0.

    Returns:
        numpy.ndarray: The draws; empty when count is 0.
    """
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    return _arr(d.quantile(rng.random(count))).reshape(count)
