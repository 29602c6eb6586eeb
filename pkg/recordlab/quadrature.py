"""Adaptive Gauss-Legendre quadrature on finite intervals."""

import logging
import math
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import QuadratureNonConvergence

logger = logging.getLogger(__name__)

NODES = 15
INITIAL_PANELS = 4
MAX_DEPTH = 30
REL_TOL = 1e-12
ABS_TOL = 1e-13


@lru_cache(maxsize=None)
def legendre_rule(points):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = special.roots_legendre(points)
    return nodes, weights


def gauss_legendre(fn, a, b, points=NODES):
    """Fixed-order Gauss-Legendre estimate of the integral of fn over [a, b].

    fn must accept a numpy array of nodes.
    """
    nodes, weights = legendre_rule(points)
    half = 0.5 * (b - a)
    middle = 0.5 * (a + b)
    values = np.broadcast_to(np.asarray(fn(middle + half * nodes), dtype=float), nodes.shape)
    return float(half * np.dot(weights, values))


def _initial_edges(a, b, panels):
    edges = list(np.linspace(a, b, panels + 1))
    # the panels touching a and b start split once
    edges.insert(1, 0.5 * (edges[0] + edges[1]))
    edges.insert(-1, 0.5 * (edges[-2] + edges[-1]))
    return edges


def integrate(fn, a, b, panels=INITIAL_PANELS, rel_tol=REL_TOL, abs_tol=ABS_TOL,
              max_depth=MAX_DEPTH):
    """Integrate fn over [a, b] by recursive bisection of 15-point panels.

    A panel is accepted when its estimate and the sum over its two halves
    differ by less than rel_tol (relative) or abs_tol (absolute).

    Args:
        fn (callable): Vectorized integrand.
        a (float): Lower limit, finite.
        b (float): Upper limit, finite.
        panels (int): Number of starting panels.
        rel_tol (float): Relative acceptance tolerance per panel.
        abs_tol (float): Absolute acceptance tolerance per panel.
        max_depth (int): Bisection depth limit.

    Returns:
        float: The integral estimate.

    Raises:
        QuadratureNonConvergence: If a panel still disagrees at max_depth.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError(f"integration limits must be finite, got ({a}, {b})")
    if a == b:
        return 0.0
    if b < a:
        return -integrate(fn, b, a, panels, rel_tol, abs_tol, max_depth)

    edges = _initial_edges(a, b, panels)
    stack = [(lo, hi, gauss_legendre(fn, lo, hi), 0) for lo, hi in zip(edges[-2::-1], edges[:0:-1])]
    accepted = []
    splits = 0
    while stack:
        lo, hi, whole, depth = stack.pop()
        middle = 0.5 * (lo + hi)
        left = gauss_legendre(fn, lo, middle)
        right = gauss_legendre(fn, middle, hi)
        refined = left + right
        if abs(refined - whole) < max(rel_tol * abs(refined), abs_tol):
            accepted.append(refined)
            continue
        if depth + 1 >= max_depth:
            raise QuadratureNonConvergence(
                f"no convergence on [{lo:.17g}, {hi:.17g}] after {max_depth} bisections"
            )
        splits += 1
        stack.append((middle, hi, right, depth + 1))
        stack.append((lo, middle, left, depth + 1))
    logger.debug("integrated over [%g, %g] with %d panels, %d splits", a, b, len(accepted), splits)
    return math.fsum(accepted)
