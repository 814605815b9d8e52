"""Boundary calculus shared by hyperbolic spaces and trees.

Every function takes the space first.  Tree quantities stay exact
(``Fraction``); hyperbolic ones are floats.  Cross ratios are handled in
log form, ``log_cross_ratio``, so that tree comparisons with 1 are exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from typing import Union

from .hyperbolic import HyperbolicSpace
from .tree import TreeSpace

Space = Union[HyperbolicSpace, TreeSpace]

LIMIT_TIMES = (20.0, 25.0, 30.0)

_FIELDS = {"rh": "R", "ch": "C", "hh": "H", "oh": "O"}


class BoundaryError(ValueError):
    pass


def parse_space(spec: str) -> Space:
    """``rh:2``, ``ch:3``, ``hh:2``, ``oh:2`` or ``tree:3``."""
    m = re.fullmatch(r"\s*([a-z]+)\s*:\s*(\d+)\s*", spec or "")
    if not m:
        raise ValueError(f"malformed space spec {spec!r}")
    family, k = m.group(1), int(m.group(2))
    if family == "tree":
        return TreeSpace(k)
    if family in _FIELDS:
        return HyperbolicSpace(_FIELDS[family], k)
    raise ValueError(f"unknown space family {family!r}")


@dataclass(frozen=True)
class ChartElement:
    """(alpha, beta, gamma, t): the point [alpha, beta]_gamma(t)."""

    alpha: object
    beta: object
    gamma: object
    t: object

    def flipped(self) -> "ChartElement":
        return ChartElement(self.beta, self.alpha, self.gamma, -self.t)


def require_distinct(space, *points):
    for i, a in enumerate(points):
        for b in points[i + 1:]:
            if space.boundary_equal(a, b):
                raise BoundaryError("boundary points must be pairwise distinct")


# -- Gromov products and horofunctions ---------------------------------------

def gromov_product_points(space, o, x, y):
    d = space.distance
    return (d(x, o) + d(y, o) - d(x, y)) / 2


def _extrapolate(values):
    """Aitken extrapolation of a geometrically converging sequence."""
    v0, v1, v2 = values
    d1, d2 = v1 - v0, v2 - v1
    denom = d2 - d1
    if abs(d2) < 1e-14 or denom == 0 or abs(d2) >= abs(d1):
        return v2
    return v2 - d2 * d2 / denom


def gromov_product_boundary(space, o, a, b, method="closed"):
    """(a|b)_o.  ``method="limit"`` evaluates the defining limit along rays."""
    if space.boundary_equal(a, b):
        raise BoundaryError("Gromov product of a boundary point with itself")
    if space.exact or method == "closed":
        return space.gromov_boundary(o, a, b)
    if method != "limit":
        raise ValueError(f"unknown method {method!r}")
    vals = [gromov_product_points(space, o, space.ray_point(o, a, t),
                                  space.ray_point(o, b, t))
            for t in LIMIT_TIMES]
    return _extrapolate(vals)


def horospherical_distance(space, a, x, y, method="closed"):
    """B_a(x, y) = lim d(x, r(t)) - d(y, r(t)) for a ray r toward a."""
    if space.exact or method == "closed":
        return space.busemann(a, x, y)
    if method != "limit":
        raise ValueError(f"unknown method {method!r}")
    o = space.origin()
    vals = []
    for t in LIMIT_TIMES:
        r = space.ray_point(o, a, t)
        vals.append(space.distance(x, r) - space.distance(y, r))
    return _extrapolate(vals)


def base_change_check(space, x, y, a, b, method="limit"):
    """|(a|b)_y - (a|b)_x + (B_a(x, y) + B_b(x, y)) / 2|."""
    lhs = gromov_product_boundary(space, y, a, b, method)
    rhs = (gromov_product_boundary(space, x, a, b, method)
           - (horospherical_distance(space, a, x, y, method)
              + horospherical_distance(space, b, x, y, method)) / 2)
    return abs(lhs - rhs)


# -- Bourdon metric and cross ratio ------------------------------------------

def bourdon_metric(space, o, a, b) -> float:
    if space.boundary_equal(a, b):
        return 0.0
    return math.exp(-gromov_product_boundary(space, o, a, b))


def log_cross_ratio(space, a, b, c, d, o=None):
    """ln w(a, b; c, d) = (a|d) + (b|c) - (a|c) - (b|d), based at o."""
    require_distinct(space, a, b, c, d)
    o = space.origin() if o is None else o
    g = space.gromov_boundary
    return g(o, a, d) + g(o, b, c) - g(o, a, c) - g(o, b, d)


def cross_ratio(space, a, b, c, d, o=None) -> float:
    return math.exp(log_cross_ratio(space, a, b, c, d, o))


def ptolemy_defect(space, a, b, c, d, o=None) -> float:
    """w(a, d; c, b) + w(a, c; d, b) - 1, which is never negative."""
    return (cross_ratio(space, a, d, c, b, o)
            + cross_ratio(space, a, c, d, b, o) - 1.0)


# -- special points and charts -------------------------------------------------

def special_offset(space, line, c):
    """Parameter s of p(a, b; c) on ``line`` = [a, b].

    Along the line f(s) = (a|c) - (b|c) at line.point(s) has slope 1, so
    s = (b|c) - (a|c) at any base point of the line.  The line evaluates
    this from pairings of the three ends alone (``center_offset``), which
    stays accurate when the line runs far from the origin; Gromov products
    at line.point(0) would lose ~e^{2r} relative precision there.
    """
    a, b = line.ends
    require_distinct(space, a, b, c)
    return line.center_offset(c)


def special_point(space, a, b, c):
    """p(a, b; c): the point p of [a, b] with d_p(a, c) = d_p(b, c)."""
    line = space.line(a, b)
    return line.point(special_offset(space, line, c))


def chart_point(space, e: ChartElement):
    """[alpha, beta]_gamma(t)."""
    line = space.line(e.alpha, e.beta)
    return line.point(special_offset(space, line, e.gamma) + e.t)


def chart_transfer(space, e: ChartElement, delta) -> ChartElement:
    """Re-express e in the chart centred by delta: t -> t + ln w(a, b; c, delta)."""
    if space.boundary_equal(delta, e.gamma):
        return e
    if space.boundary_equal(delta, e.alpha) or space.boundary_equal(delta, e.beta):
        raise BoundaryError("chart centre must differ from the line's ends")
    shift = log_cross_ratio(space, e.alpha, e.beta, e.gamma, delta)
    return ChartElement(e.alpha, e.beta, delta, e.t + shift)


def orient(space, e: ChartElement, alpha) -> ChartElement:
    """Flip e if needed so its first end is ``alpha``."""
    if space.boundary_equal(e.alpha, alpha):
        return e
    if space.boundary_equal(e.beta, alpha):
        return e.flipped()
    raise BoundaryError("end does not belong to the line")


def same_line(space, e1: ChartElement, e2: ChartElement) -> bool:
    eq = space.boundary_equal
    return ((eq(e1.alpha, e2.alpha) and eq(e1.beta, e2.beta))
            or (eq(e1.alpha, e2.beta) and eq(e1.beta, e2.alpha)))


def with_t(e: ChartElement, t) -> ChartElement:
    return replace(e, t=t)


# -- RH^2 helper ------------------------------------------------------------------

def rh2_angle(space, o, a, b) -> float:
    """Angle at o between the rays [o, a) and [o, b); real hyperbolic plane only."""
    if not (isinstance(space, HyperbolicSpace) and space.field == "R" and space.n == 2):
        raise BoundaryError("angles are only provided in the real hyperbolic plane")
    from .hyperbolic import form, real_form
    x = o.v
    # unit tangents toward a and b: a' - x with <x|a'> = -1
    ta = a.v / -form(x, a.v)[0] - x
    tb = b.v / -form(x, b.v)[0] - x
    diff = ta - tb
    summ = ta + tb
    return 2.0 * math.atan2(math.sqrt(max(real_form(diff, diff), 0.0)),
                            math.sqrt(max(real_form(summ, summ), 0.0)))


def random_boundary_points(space, rng, k, avoid=()):
    """k pairwise distinct random boundary points, distinct from ``avoid``."""
    out = list(avoid)
    while len(out) < len(avoid) + k:
        a = space.random_boundary(rng)
        if all(not space.boundary_equal(a, b) for b in out):
            out.append(a)
    return out[len(avoid):]
