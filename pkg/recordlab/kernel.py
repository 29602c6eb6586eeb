"""Divided differences of a function h and their mixed partial derivatives.

For a function h and u != v this module evaluates

    M(u, v) = (h(v) - h(u)) / (v - u)

and the mixed partials iMj(u, v) = d^(i+j) M / du^i dv^j. The partials are
computed from the recurrences

    Mj  = (h^(j)(v) - j M(j-1)) / (v - u)
    jM  = (j (j-1)M - h^(j)(u)) / (v - u)
    iMj = (i (i-1)Mj - j iM(j-1)) / (v - u)

filled bottom-up over the (i, j) rectangle. An independent finite-difference
oracle works on M directly and never touches the recurrences.

Each recurrence step divides a difference of nearby numbers by v - u, so the
table loses digits as i + j grows. Functions that carry a precise tower
(Decimal arguments, Decimal results) are run through both the recurrences and
the oracle in 50-digit decimal arithmetic and rounded to float once at the end.
"""

import decimal
import functools
import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import DiagonalTooClose, DomainError, OrderTooHigh, StencilCrossesDiagonal

logger = logging.getLogger(__name__)

MAX_EXACT_ORDER = 20
EPS = np.finfo(float).eps

RIDDERS_RATIO = 1.4
RIDDERS_LEVELS = 10
RIDDERS_SAFE = 2

PRECISE = decimal.Context(prec=50)
PRECISE_RATIO = 2
PRECISE_LEVELS = 10


def factorial(n):
    """Exact n! for 0 <= n <= 20.

    Raises:
        OrderTooHigh: If n exceeds 20.
        ValueError: If n is negative.
    """
    if n < 0:
        raise ValueError(f"factorial of negative number {n}")
    if n > MAX_EXACT_ORDER:
        raise OrderTooHigh(f"factorial({n}) exceeds the exact range (<= {MAX_EXACT_ORDER})")
    return math.factorial(n)


def falling_factorial(x, n):
    """Exact falling factorial (x)_n = x (x-1) ... (x-n+1), with (x)_0 = 1.

    Args:
        x (int or Fraction): Base. Integers and Fractions stay exact.
        n (int): Number of factors, 0 <= n <= 20.

    Returns:
        int or Fraction: The falling factorial.

    Raises:
        OrderTooHigh: If n exceeds 20.
    """
    if n < 0:
        raise ValueError(f"falling factorial needs n >= 0, got {n}")
    if n > MAX_EXACT_ORDER:
        raise OrderTooHigh(f"falling factorial of length {n} exceeds {MAX_EXACT_ORDER}")
    result = 1
    for step in range(n):
        result *= x - step
    return result


def diagonal_threshold(u, v):
    """Smallest admissible |v - u| for the pair (u, v)."""
    return 1e-6 * max(1.0, abs(u), abs(v))


def fd_step(order, x):
    """Central-difference step for derivative `order` at x.

    Balances truncation against rounding: eps^(1/(order+2)) * max(1, |x|).
    """
    return EPS ** (1.0 / (order + 2)) * np.maximum(1.0, np.abs(x))


def _central_weights(order):
    """Offsets (in steps) and weights of the central difference of `order`."""
    offsets = np.arange(order + 1) - order / 2.0
    weights = np.array([(-1) ** (order - l) * math.comb(order, l) for l in range(order + 1)],
                       dtype=float)
    return offsets, weights



def _extrapolate(estimate, step, ratio, levels, floor=0):
    """Ridders' extrapolation of estimate(s) to s -> 0 over steps step / ratio^k.

    Works on floats and on Decimals alike; with Decimals the ratio must be
    an integer. Returns the tableau entry with the smallest error estimate
    and that estimate. Steps below `floor` are not tried.
    """
    ratio2 = ratio * ratio
    previous = [estimate(step)]
    best, best_err = previous[0], math.inf
    s = step
    for _ in range(1, levels):
        s = s / ratio
        if s < floor:
            break
        current = [estimate(s)]
        fac = ratio2
        for row in range(1, len(previous) + 1):
            current.append((current[row - 1] * fac - previous[row - 1]) / (fac - 1))
            fac = fac * ratio2
            err = max(abs(current[row] - current[row - 1]), abs(current[row] - previous[row - 1]))
            if err <= best_err:
                best, best_err = current[row], err
        if abs(current[-1] - previous[-1]) >= RIDDERS_SAFE * best_err:
            break
        previous = current
    return best, best_err


@dataclass(frozen=True)
class DerivableFunction:
    """A function h together with its derivative tower.

    Attributes:
        name (str): Short label used in reports.
        value (callable): h itself; must accept floats and numpy arrays.
        tower (callable): (order, x) -> h^(order)(x) for order >= 1.
        max_order (int): Highest derivative order available.
        domain (tuple): Open interval (lo, hi) where h is defined.
        precise (callable, optional): (order, x) -> h^(order)(x) on Decimal
            arguments, order 0 included. Called only inside the PRECISE
            context.
    """
    name: str
    value: Callable
    tower: Callable
    max_order: int
    domain: tuple = (-math.inf, math.inf)
    precise: Optional[Callable] = None

    def __call__(self, x):
        return self.value(x)

    def deriv(self, order, x):
        """Evaluate h^(order)(x); order 0 is h itself.

        Raises:
            OrderTooHigh: If order exceeds max_order.
        """
        if order < 0:
            raise ValueError(f"derivative order must be >= 0, got {order}")
        if order > self.max_order:
            raise OrderTooHigh(
                f"{self.name}: derivative of order {order} requested, "
                f"only {self.max_order} available"
            )
        if order == 0:
            return self.value(x)
        return self.tower(order, x)

    def contains(self, x):
        """True when x lies in the open domain."""
        lo, hi = self.domain
        return lo < x < hi

    def derivative(self):
        """The tower of h': value h', derivative m is h^(m+1)."""
        if self.max_order < 1:
            raise OrderTooHigh(f"{self.name} has no first derivative")
        precise = self.precise
        return DerivableFunction(
            name=f"{self.name}'",
            value=lambda x: self.deriv(1, x),
            tower=lambda order, x: self.deriv(order + 1, x),
            max_order=self.max_order - 1,
            domain=self.domain,
            precise=None if precise is None else lambda order, x: precise(order + 1, x),
        )


# --- Catalog ---

def power_normalized(p):
    """h(x) = x^p / p!, so that h^(p-1)(x) = x."""
    if p < 1:
        raise ValueError(f"power_normalized needs p >= 1, got {p}")
    norm = factorial(p)

    def tower(order, x):
        x = np.asarray(x, dtype=float)
        if order > p:
            return np.zeros_like(x)[()]
        return x ** (p - order) / math.factorial(p - order)

    def precise(order, x):
        if order > p:
            return Decimal(0)
        if order == p:
            return Decimal(1)
        return x ** (p - order) / math.factorial(p - order)

    return DerivableFunction(
        name=f"power:{p}",
        value=lambda x: np.asarray(x, dtype=float) ** p / norm,
        tower=tower,
        max_order=MAX_EXACT_ORDER,
        precise=precise,
    )


def neg_reciprocal(k):
    """h(x) = (-1)^k / (k! x), so that h^(k)(x) = 1 / x^(k+1)."""
    if k < 1:
        raise ValueError(f"neg_reciprocal needs k >= 1, got {k}")
    sign = (-1) ** k
    norm = factorial(k)

    def tower(order, x):
        x = np.asarray(x, dtype=float)
        return sign * (-1) ** order * math.factorial(order) / (norm * x ** (order + 1))

    def precise(order, x):
        return sign * (-1) ** order * math.factorial(order) / (norm * x ** (order + 1))

    return DerivableFunction(
        name=f"negrecip:{k}",
        value=lambda x: sign / (norm * np.asarray(x, dtype=float)),
        tower=tower,
        max_order=MAX_EXACT_ORDER,
        domain=(0.0, math.inf),
        precise=precise,
    )


def double_sqrt():
    """h(x) = 2 sqrt(x), so that h'(x) = x^(-1/2)."""
    half = Fraction(1, 2)

    def tower(order, x):
        x = np.asarray(x, dtype=float)
        return 2.0 * float(falling_factorial(half, order)) * x ** (0.5 - order)

    def precise(order, x):
        coefficient = falling_factorial(half, order)
        return 2 * coefficient.numerator * x.sqrt() / (coefficient.denominator * x ** order)

    return DerivableFunction(
        name="sqrt2",
        value=lambda x: 2.0 * np.sqrt(np.asarray(x, dtype=float)),
        tower=tower,
        max_order=MAX_EXACT_ORDER,
        domain=(0.0, math.inf),
        precise=precise,
    )


def plain_reciprocal():
    """h(x) = -1/x."""

    def tower(order, x):
        x = np.asarray(x, dtype=float)
        return (-1) ** (order + 1) * math.factorial(order) / x ** (order + 1)

    def precise(order, x):
        return (-1) ** (order + 1) * math.factorial(order) / x ** (order + 1)

    return DerivableFunction(
        name="reciprocal",
        value=lambda x: -1.0 / np.asarray(x, dtype=float),
        tower=tower,
        max_order=MAX_EXACT_ORDER,
        domain=(0.0, math.inf),
        precise=precise,
    )


def _tower_step(order, x, domain):
    """Largest step of a derivative tower at x; the stencil stays inside the domain."""
    lo, hi = domain
    room = min(x - lo, hi - x)
    if room <= 0:
        raise DomainError(f"{x} is outside the domain {domain}")
    return min(0.5 * max(1.0, abs(x)), room / order)


def _central_tower(value, order, x, domain):
    offsets, weights = _central_weights(order)

    def estimate(s):
        return float(sum(w * value(x + o * s) for o, w in zip(offsets, weights))) / s ** order

    best, _ = _extrapolate(estimate, _tower_step(order, x, domain), RIDDERS_RATIO, RIDDERS_LEVELS,
                           floor=float(fd_step(order, x)))
    return best


def _precise_central_tower(precise, order, x, domain):
    if order == 0:
        return precise(x)
    offsets, weights = _central_weights(order)
    terms = [(Decimal(float(o)), int(w)) for o, w in zip(offsets, weights)]

    def estimate(s):
        return sum(w * precise(x + o * s) for o, w in terms) / s ** order

    start = Decimal(float(_tower_step(order, float(x), domain)))
    best, _ = _extrapolate(estimate, start, PRECISE_RATIO, PRECISE_LEVELS)
    return best


def user(f, fd_orders, domain=(-math.inf, math.inf), name="user", vectorized=False, precise=None):
    """Wrap an arbitrary evaluator; derivatives come from central differences.

    Each derivative is extrapolated over shrinking central-difference steps,
    starting from a step that keeps the stencil inside the domain and never
    going below fd_step(order, x). Float towers are good to about 1e-8
    relative; the mixed partials built from them lose digits near the
    diagonal, so pass `precise` when orders above four matter.

    Args:
        f (callable): The function h.
        fd_orders (int): Highest derivative order to offer.
        domain (tuple): Open interval where f is defined.
        name (str): Label for reports.
        vectorized (bool): Whether f already accepts numpy arrays. When
            False, f is wrapped with numpy.vectorize.
        precise (callable, optional): h on Decimal arguments, for example
            Decimal.exp. Enables the 50-digit paths of mixed_table and
            mixed_deriv_fd.

    Returns:
        DerivableFunction: The wrapped function.
    """
    value = f if vectorized else np.vectorize(f, otypes=[float])

    def scalar_tower(order, x):
        return _central_tower(value, order, float(x), domain)

    def tower(order, x):
        return np.vectorize(functools.partial(scalar_tower, order), otypes=[float])(x)[()]

    precise_tower = None
    if precise is not None:
        precise_tower = functools.lru_cache(maxsize=None)(
            functools.partial(_precise_central_tower, precise, domain=domain))
    return DerivableFunction(name=name, value=value, tower=tower, max_order=fd_orders,
                             domain=domain, precise=precise_tower)


# --- Divided differences ---

@dataclass(frozen=True)
class MixedDiffRequest:
    """Orders i (in u) and j (in v) at the point (u, v)."""
    i: int
    j: int
    u: float
    v: float

    def validate(self, f):
        """Check the request against f.

        Raises:
            OrderTooHigh: If i + j exceeds f.max_order.
            DomainError: If u or v is outside f.domain.
            DiagonalTooClose: If |v - u| is below the diagonal threshold.
        """
        if self.i < 0 or self.j < 0:
            raise ValueError(f"orders must be nonnegative, got ({self.i}, {self.j})")
        if self.i + self.j > f.max_order:
            raise OrderTooHigh(
                f"{f.name}: mixed order {self.i}+{self.j} exceeds max_order {f.max_order}"
            )
        _check_pair(f, self.u, self.v)


def _check_pair(f, u, v):
    for point in (u, v):
        if not f.contains(point):
            raise DomainError(f"{f.name}: {point} is outside the domain {f.domain}")
    if abs(v - u) < diagonal_threshold(u, v):
        raise DiagonalTooClose(f"|v - u| = {abs(v - u):.3g} is too close to the diagonal")


def divided_diff(f, u, v):
    """Secant slope M(u, v) = (h(v) - h(u)) / (v - u).

    Args:
        f (DerivableFunction): The function h.
        u (float): Left point.
        v (float): Right point.

    Returns:
        float: The divided difference; exactly symmetric in (u, v).

    Raises:
        DiagonalTooClose: If |v - u| is below the diagonal threshold.
        DomainError: If u or v lies outside f.domain.
    """
    _check_pair(f, u, v)
    return float((f(v) - f(u)) / (v - u))


def _fill_table(table, deriv, u, v):
    """Fill table[a][b] from table[0][0] with the recurrences."""
    rows, cols = len(table), len(table[0])
    gap = v - u
    for b in range(1, cols):
        table[0][b] = (deriv(b, v) - b * table[0][b - 1]) / gap
    for a in range(1, rows):
        table[a][0] = (a * table[a - 1][0] - deriv(a, u)) / gap
    for a in range(1, rows):
        for b in range(1, cols):
            table[a][b] = (a * table[a - 1][b] - b * table[a][b - 1]) / gap
    return table


def mixed_table(f, i, j, u, v):
    """All partials aMb(u, v) for a <= i, b <= j, as an (i+1, j+1) array."""
    request = MixedDiffRequest(i, j, u, v)
    request.validate(f)
    if f.precise is None:
        table = np.empty((i + 1, j + 1))
        table[0, 0] = divided_diff(f, u, v)
        return _fill_table(table, f.deriv, u, v)
    with decimal.localcontext(PRECISE):
        pu, pv = Decimal(float(u)), Decimal(float(v))
        table = [[Decimal(0)] * (j + 1) for _ in range(i + 1)]
        table[0][0] = (f.precise(0, pv) - f.precise(0, pu)) / (pv - pu)
        _fill_table(table, f.precise, pu, pv)
        return np.array([[float(entry) for entry in row] for row in table])


def mixed_deriv(f, req):
    """Mixed partial iMj(u, v) of the divided difference via the recurrences.

    Args:
        f (DerivableFunction): The function h.
        req (MixedDiffRequest): Orders and evaluation point.

    Returns:
        float: d^(i+j) M / du^i dv^j at (u, v).

    Raises:
        DiagonalTooClose: If u and v are too close.
        OrderTooHigh: If i + j exceeds f.max_order.
        DomainError: If u or v lies outside f.domain.
    """
    return float(mixed_table(f, req.i, req.j, req.u, req.v)[req.i, req.j])


def _auto_step(f, req):
    lo, hi = f.domain
    order = req.i + req.j
    limits = [2.0 * abs(req.v - req.u) / order, 0.25 * max(1.0, abs(req.u), abs(req.v))]
    for point, count in ((req.u, req.i), (req.v, req.j)):
        if count:
            limits.append(2.0 * (point - lo) / count)
            limits.append(2.0 * (hi - point) / count)
    return 0.5 * min(limits)


def _check_stencil(f, req, step):
    lo, hi = f.domain
    reach_u = req.i * step / 2.0
    reach_v = req.j * step / 2.0
    if not (lo < req.u - reach_u and req.u + reach_u < hi
            and lo < req.v - reach_v and req.v + reach_v < hi):
        raise DomainError(f"{f.name}: stencil with step {step:g} leaves the domain {f.domain}")
    separation = abs(req.v - req.u) - reach_u - reach_v
    if separation < diagonal_threshold(req.u, req.v):
        raise StencilCrossesDiagonal(
            f"stencil with step {step:g} reaches the diagonal at ({req.u}, {req.v})"
        )


def _float_stencil(f, req):
    offsets_u, weights_u = _central_weights(req.i)
    offsets_v, weights_v = _central_weights(req.j)
    order = req.i + req.j

    def stencil(s):
        grid_u, grid_v = np.meshgrid(req.u + offsets_u * s, req.v + offsets_v * s, indexing="ij")
        values = (f(grid_v) - f(grid_u)) / (grid_v - grid_u)
        return float(weights_u @ values @ weights_v) / s ** order

    return stencil


def _precise_stencil(f, req):
    order = req.i + req.j
    u, v = Decimal(float(req.u)), Decimal(float(req.v))

    def terms(count):
        offsets, weights = _central_weights(count)
        return [(Decimal(float(o)), int(w)) for o, w in zip(offsets, weights)]

    terms_u, terms_v = terms(req.i), terms(req.j)

    def stencil(s):
        points_u = [(u + o * s, w) for o, w in terms_u]
        points_v = [(v + o * s, w) for o, w in terms_v]
        values_u = [f.precise(0, x) for x, _ in points_u]
        values_v = [f.precise(0, y) for y, _ in points_v]
        total = sum(wu * wv * (hv - hu) / (y - x)
                    for (x, wu), hu in zip(points_u, values_u)
                    for (y, wv), hv in zip(points_v, values_v))
        return total / s ** order

    return stencil


def mixed_deriv_fd(f, req, step=None):
    """Finite-difference oracle for iMj(u, v), applied to M directly.

    Uses the product of central differences of orders i (in u) and j (in v)
    and extrapolates over a geometric sequence of steps, keeping the
    tableau entry with the smallest error estimate. Functions with a precise
    tower are differenced in 50-digit arithmetic, which takes the rounding
    floor of the high-order stencils far below any float tolerance.

    Args:
        f (DerivableFunction): The function h.
        req (MixedDiffRequest): Orders and evaluation point.
        step (float, optional): Largest step of the sequence. Chosen from
            the distance to the diagonal and the domain edges when omitted.

    Returns:
        float: The extrapolated derivative estimate.

    Raises:
        DomainError: If the stencil leaves the domain.
        StencilCrossesDiagonal: If the stencil reaches the diagonal.
    """
    if req.i < 0 or req.j < 0:
        raise ValueError(f"orders must be nonnegative, got ({req.i}, {req.j})")
    if req.i == 0 and req.j == 0:
        return divided_diff(f, req.u, req.v)
    _check_pair(f, req.u, req.v)
    if step is None:
        step = _auto_step(f, req)
    _check_stencil(f, req, step)

    if f.precise is None:
        best, best_err = _extrapolate(_float_stencil(f, req), step, RIDDERS_RATIO, RIDDERS_LEVELS)
    else:
        with decimal.localcontext(PRECISE):
            best, best_err = _extrapolate(_precise_stencil(f, req), Decimal(float(step)),
                                          PRECISE_RATIO, PRECISE_LEVELS)
            best, best_err = float(best), float(best_err)
    logger.debug("fd oracle %s (%d,%d) at (%g,%g): %.17g +/- %.3g",
                 f.name, req.i, req.j, req.u, req.v, best, best_err)
    return float(best)
