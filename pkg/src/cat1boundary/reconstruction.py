"""Intersections of geodesics read off from cross ratios, and the
reconstruction of the space from its boundary.

A point of the reconstructed space is a chart element (alpha, beta, gamma, t).
Two elements are identified by flipping orientation, by moving between charts
of one line with ``chart_transfer``, and by the intersection relation between
two lines whose cross ratios satisfy the oplus condition.  The model is only
used to pick candidate boundary points (a line through two given points, a
third line through an intersection); every coordinate and every distance is
then computed from cross ratios.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boundary import (BoundaryError, ChartElement, chart_point, chart_transfer,
                       log_cross_ratio, orient,
                       random_boundary_points, require_distinct, same_line,
                       special_offset, special_point)
from .hyperbolic import (bourdon_third_direction, endpoints,
                         form, geodesic_symmetry, kinv, rscale, TangentVector)
from .report import SuiteReport

# the intersection relation is applied at most this many times in a chain
MAX_CHAIN = 4


class ReconstructionError(BoundaryError):
    pass


class NotIntersecting(ReconstructionError):
    pass


def tolerance(space):
    return 0 if space.exact else space.tol


def oplus_mode(space) -> str:
    """``"max"`` for trees, ``"sum"`` for hyperbolic spaces."""
    return "max" if space.exact else "sum"


def oplus_defect(space, a, b, c, d):
    """w(a, c; d, b) (+) w(a, d; c, b) minus 1, in a form that is exact for trees.

    Never negative.  Trees return max of the two log cross ratios (a
    Fraction); hyperbolic spaces return the sum of the two ratios minus 1.
    """
    l2 = log_cross_ratio(space, a, c, d, b)
    l3 = log_cross_ratio(space, a, d, c, b)
    if space.exact:
        return max(l2, l3)
    return math.exp(l2) + math.exp(l3) - 1.0


def intersects(space, a, b, c, d, tol=None) -> bool:
    """Whether [a, b] and [c, d] meet, decided by the oplus condition.

    Exact for trees.  In a hyperbolic space a true answer certifies an
    intersection; for K != R intersecting lines that do not span a real
    hyperbolic plane are not detected.
    """
    require_distinct(space, a, b, c, d)
    defect = oplus_defect(space, a, b, c, d)
    if space.exact:
        return defect == 0
    return abs(defect) <= (1e-8 if tol is None else tol)


@dataclass(frozen=True)
class IntersectionSet:
    """Chart coordinates shared by two intersecting lines."""

    kind: str  # "singleton" or "interval"
    lo: object
    hi: object

    def contains(self, t, tol=0) -> bool:
        return self.distance(t) <= tol

    def distance(self, t):
        if t < self.lo:
            return self.lo - t
        if t > self.hi:
            return t - self.hi
        return 0 if isinstance(t, Fraction) else 0.0

    @property
    def value(self):
        if self.kind != "singleton":
            raise ReconstructionError("interval has no single value")
        return self.lo


@dataclass(frozen=True)
class Quadruple:
    alpha: object
    beta: object
    gamma: object
    delta: object
    swapped_ab: bool = False
    swapped_cd: bool = False

    def __iter__(self):
        return iter((self.alpha, self.beta, self.gamma, self.delta))


def normalize_for_chi(space, a, b, c, d, tol=None) -> Quadruple:
    """Swap c, d and/or a, b so that [a, b] meets [c, d] with w(a, b; c, d) <= 1.

    Tries, in order: no swap, c <-> d, a <-> b, both.
    """
    if not intersects(space, a, b, c, d, tol):
        raise NotIntersecting("no labelling satisfies the oplus condition")
    for swap_ab, swap_cd in ((False, False), (False, True), (True, False), (True, True)):
        A, B = (b, a) if swap_ab else (a, b)
        C, D = (d, c) if swap_cd else (c, d)
        if log_cross_ratio(space, A, B, C, D) <= 0:
            return Quadruple(A, B, C, D, swap_ab, swap_cd)
    raise NotIntersecting("no labelling has w(a, b; c, d) <= 1")  # unreachable


def chi_set(space, a, b, c, d, tol=None) -> IntersectionSet:
    """Coordinates s with [a, b]_c(s) = [c, d]_a(s)."""
    if not intersects(space, a, b, c, d, tol):
        raise ReconstructionError("the oplus condition fails")
    lw = log_cross_ratio(space, a, b, c, d)
    if lw > (0 if space.exact else (1e-8 if tol is None else tol)):
        raise ReconstructionError("w(a, b; c, d) > 1; normalise the quadruple first")
    if space.exact:
        return IntersectionSet("interval", Fraction(0), -lw)
    v = abs(lw) / 2
    return IntersectionSet("singleton", v, v)


# -- trees: the four configurations --------------------------------------------

@dataclass(frozen=True)
class TreeCase:
    label: int
    log_ratios: tuple
    pattern: tuple  # equalities among the four special points

    @property
    def name(self) -> str:
        return f"Case{self.label}"


_RATIO_SIGNS = {
    (-1, 0, -1): 1,
    (1, -1, 0): 2,
    (0, 1, 1): 3,
    (0, 0, 0): 4,
}

# which of p(a,b;c) = p(c,d;a), p(a,b;d) = p(c,d;b), p(a,b;d) = p(c,d;a),
# p(a,b;c) = p(c,d;b), p(a,b;c) = p(a,b;d), p(c,d;a) = p(c,d;b) hold
_PATTERNS = {
    1: (True, True, False, False, False, False),
    2: (False, False, True, True, False, False),
    3: (False, False, False, False, True, True),
    4: (True, True, True, True, True, True),
}


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def tree_four_case(space, a, b, c, d) -> TreeCase:
    """Classify four distinct ends by the signs of three log cross ratios,
    and check the matching pattern of special-point equalities."""
    if not space.exact:
        raise ReconstructionError("the four-case classification is for trees")
    require_distinct(space, a, b, c, d)
    l1 = log_cross_ratio(space, a, b, c, d)
    l2 = log_cross_ratio(space, a, c, d, b)
    l3 = log_cross_ratio(space, a, d, c, b)
    signs = (_sign(l1), _sign(l2), _sign(l3))
    if signs not in _RATIO_SIGNS:
        raise ReconstructionError(f"cross ratio signs {signs} match no case")
    label = _RATIO_SIGNS[signs]
    pattern = special_point_pattern(space, a, b, c, d)
    if pattern != _PATTERNS[label]:
        raise ReconstructionError(
            f"special points {pattern} disagree with Case{label}")
    return TreeCase(label, (l1, l2, l3), pattern)


def special_point_pattern(space, a, b, c, d) -> tuple:
    p_abc = special_point(space, a, b, c)
    p_abd = special_point(space, a, b, d)
    p_cda = special_point(space, c, d, a)
    p_cdb = special_point(space, c, d, b)
    return (p_abc == p_cda, p_abd == p_cdb, p_abd == p_cda,
            p_abc == p_cdb, p_abc == p_abd, p_cda == p_cdb)


# -- hyperbolic: the midpoint property ------------------------------------------

def intersection_point(space, a, b, c, d, tol=None):
    """Model point where [a, b] meets [c, d] (ternary search on a convex distance)."""
    if space.exact:
        raise ReconstructionError("use the special points in a tree")
    l1, l2 = space.line(a, b), space.line(c, d)
    f = lambda s: l2.distance_to(l1.point(s))
    lo, hi = -35.0, 35.0
    for _ in range(200):
        if hi - lo < 1e-13:
            break
        m1 = lo + (hi - lo) * 0.381966
        m2 = hi - (hi - lo) * 0.381966
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    s = 0.5 * (lo + hi)
    o = l1.point(s)
    if f(s) > (space.tol if tol is None else tol):
        raise NotIntersecting(f"lines stay {f(s):.3e} apart")
    # pull onto the second line to balance the error
    return l1.point(l1.locate(l2.point(l2.locate(o))))


def midpoint_check(space, a, b, c, d, o=None) -> float:
    """|d(o, p(a,b;c)) - d(o, p(a,b;d))| at the intersection o, together with
    the symmetry facts behind it.

    The point reflection at o reverses [a, b], so it must send the parameter
    of p(a,b;c) to that of p(a,b;d); and it carries (a|c)_p to (b|d) and
    (b|c)_p to (a|d) at the image of p.  The Gromov-product identities are
    probed at o and at unit distance from o along both lines, where the
    model coordinates are well conditioned.
    """
    if space.exact:
        raise ReconstructionError("midpoint property is for hyperbolic spaces")
    require_distinct(space, a, b, c, d)
    if o is None:
        o = intersection_point(space, a, b, c, d)
    elif max(space.line(a, b).distance_to(o), space.line(c, d).distance_to(o)) > space.tol:
        raise NotIntersecting("o is not on both lines")
    line = space.line(a, b)
    sc = special_offset(space, line, c)
    sd = special_offset(space, line, d)
    so = line.locate(o)
    resid = abs(space.distance(o, line.point(sc)) - space.distance(o, line.point(sd)))
    resid = max(resid, abs((sc + sd) / 2 - so))
    other = space.line(c, d)
    probes = [o, line.point(so + 1.0), other.point(other.locate(o) + 1.0)]
    g = space.gromov_boundary
    for p in probes:
        img = geodesic_symmetry(o, p)
        resid = max(resid, abs(g(p, a, c) - g(img, b, d)),
                    abs(g(p, b, c) - g(img, a, d)))
    return resid


# -- moving between lines ----------------------------------------------------------

def element_at(space, a, b, c, p) -> ChartElement:
    """The chart element on [a, b] centred by c naming the point p of [a, b]."""
    line = space.line(a, b)
    return ChartElement(a, b, c, line.locate(p) - special_offset(space, line, c))


def _chart_center(space, ends, prefer):
    for g in prefer:
        if all(not space.boundary_equal(g, e) for e in ends):
            return g
    raise ReconstructionError("no admissible chart centre")


def relate(space, e: ChartElement, c, d, tol=None):
    """Carry e across the intersection relation onto the line [c, d].

    Returns ``(f, residual)`` where f lies on [c, d] and residual is how far
    e's coordinate is from the shared coordinates; the relation applies only
    when the residual vanishes (within tolerance).
    """
    q = normalize_for_chi(space, e.alpha, e.beta, c, d, tol)
    chi = chi_set(space, *q, tol=tol)
    s = chart_transfer(space, orient(space, e, q.alpha), q.gamma).t
    return ChartElement(q.gamma, q.delta, q.alpha, s), chi.distance(s)


def compare_on_line(space, e: ChartElement, f: ChartElement):
    """Signed t(f) - t(e) after bringing f into e's chart on the same line."""
    if not same_line(space, e, f):
        raise ReconstructionError("elements lie on different lines")
    g = chart_transfer(space, orient(space, f, e.alpha), e.gamma)
    return g.t - e.t


def third_geodesic(space, e1: ChartElement, e2: ChartElement):
    """A line [a'', b''] through the common point of e1 and e2 meeting both
    lines under the oplus condition.  Returns (a'', b'', g'', r)."""
    if same_line(space, e1, e2):
        raise ReconstructionError("elements lie on the same line")
    p = chart_point(space, e1)
    if not space.same_point(p, chart_point(space, e2)):
        raise NotIntersecting("elements name different points")
    ends = (e1.alpha, e1.beta, e2.alpha, e2.beta)
    if space.exact:
        a2, b2 = space.line_through_point(p, avoid=ends)
    else:
        u = _direction(p, e1.beta)
        v = _direction(p, e2.beta)
        w = bourdon_third_direction(p, u, v)
        a2, b2 = endpoints(p, w)
    g2 = _chart_center(space, (a2, b2), (e1.alpha, e1.beta, e2.alpha))
    line = space.line(a2, b2)
    r = line.locate(p) - special_offset(space, line, g2)
    return a2, b2, g2, r


def _direction(p, a) -> TangentVector:
    """Unit tangent at p pointing to the boundary point a."""
    x = p.v
    aa = rscale(a.v, -kinv(form(x, a.v)))
    return TangentVector(p, aa - x, check=False)


def third_geodesic_defects(space, e1, e2, third):
    """The two oplus defects certifying a third geodesic."""
    a2, b2 = third[0], third[1]
    return (oplus_defect(space, e1.alpha, e1.beta, a2, b2),
            oplus_defect(space, e2.alpha, e2.beta, a2, b2))


@dataclass
class Expression:
    element: ChartElement
    residual: object
    relations: int


def express(space, e: ChartElement, a, b, tol=None) -> Expression:
    """An element on the line [a, b] equivalent to e, built from cross ratios.

    Uses the intersection relation directly when it applies and otherwise
    routes through a third geodesic.  Raises NotIntersecting when e's point
    is not on [a, b].
    """
    tol = tolerance(space) if tol is None else tol
    target = ChartElement(a, b, e.gamma, 0)
    if same_line(space, e, target):
        return Expression(orient(space, e, a), 0, 0)
    ends = (e.alpha, e.beta, a, b)
    if _distinct(space, ends) and intersects(space, *ends, tol=_oplus_tol(space)):
        f, res = relate(space, e, a, b)
        if res <= tol:
            return Expression(orient(space, f, a), res, 1)
    # route through a third line: point on [a, b] named by e
    line = space.line(a, b)
    p = chart_point(space, e)
    if line.distance_to(p) > (space.tol if not space.exact else 0):
        raise NotIntersecting("the element's point is off the target line")
    c = _chart_center(space, (a, b), (e.alpha, e.beta))
    anchor = element_at(space, a, b, c, p)
    a2, b2, g2, r = third_geodesic(space, e, anchor)
    f1, res1 = relate(space, e, a2, b2)
    f2, res2 = relate(space, f1, a, b)
    return Expression(orient(space, f2, a), max(res1, res2), 2)


def _oplus_tol(space):
    return 0 if space.exact else 1e-8


def _distinct(space, pts) -> bool:
    return all(not space.boundary_equal(x, y)
               for i, x in enumerate(pts) for y in pts[i + 1:])


def omega_equivalent(space, e1: ChartElement, e2: ChartElement, tol=None) -> bool:
    """Whether e1 and e2 are identified in the reconstructed space."""
    tol = tolerance(space) if tol is None else tol
    if same_line(space, e1, e2):
        return abs(compare_on_line(space, e1, e2)) <= tol
    ends = (e1.alpha, e1.beta, e2.alpha, e2.beta)
    if _distinct(space, ends) and intersects(space, *ends, tol=_oplus_tol(space)):
        f, res = relate(space, e1, e2.alpha, e2.beta)
        if res <= tol:
            return abs(compare_on_line(space, e2, f)) <= tol
    try:
        a2, b2, _, _ = third_geodesic(space, e1, e2)
    except NotIntersecting:
        return False
    f1, res1 = relate(space, e1, a2, b2)
    f2, res2 = relate(space, f1, e2.alpha, e2.beta)
    if max(res1, res2) > tol:
        return False
    return abs(compare_on_line(space, e2, f2)) <= tol


def model_join(space, e1, e2, variant=0):
    """Ends of a line through the points of e1 and e2, found in the model."""
    p, q = chart_point(space, e1), chart_point(space, e2)
    avoid = (e1.alpha, e1.beta, e2.alpha, e2.beta)
    if space.exact:
        a, b = space.join(p, q, avoid=avoid)
        for _ in range(variant):
            a, b = space.join(p, q, avoid=avoid + (a, b))
        return a, b
    if space.same_point(p, q, tol=1e-12):
        a, b = endpoints(p, _direction(p, e1.beta))
    else:
        a, b = space.join(p, q)
    return (a, b) if variant % 2 == 0 else (b, a)


def d_omega(space, e1: ChartElement, e2: ChartElement, join=None, gamma=None):
    """Distance between two elements, computed in a common chart."""
    if same_line(space, e1, e2):
        if gamma is not None:
            e1 = chart_transfer(space, e1, gamma)
        return abs(compare_on_line(space, e1, e2))
    a, b = join if join is not None else model_join(space, e1, e2)
    x1 = express(space, e1, a, b).element
    x2 = express(space, e2, a, b).element
    if gamma is not None:
        x1 = chart_transfer(space, x1, gamma)
    return abs(compare_on_line(space, x1, x2))


class OmegaElement:
    """A point of the reconstructed space, represented by one chart element."""

    def __init__(self, space, chart: ChartElement):
        require_distinct(space, chart.alpha, chart.beta, chart.gamma)
        self.space = space
        self.chart = chart

    def point(self):
        return chart_point(self.space, self.chart)

    def distance(self, other: "OmegaElement"):
        return d_omega(self.space, self.chart, other.chart)

    def __eq__(self, other):
        if not isinstance(other, OmegaElement) or other.space != self.space:
            return NotImplemented
        return omega_equivalent(self.space, self.chart, other.chart)

    __hash__ = None

    def __repr__(self):
        return f"OmegaElement({self.space.name}, {self.chart})"


# -- certification -----------------------------------------------------------------

CERTIFY_CLAIM = ("the chart model with d_omega is isometric to the space "
                 "via (alpha, beta, gamma, t) -> [alpha, beta]_gamma(t)")


def random_element(space, p, rng) -> ChartElement:
    """A chart element naming the model point p, on a random line through p."""
    a, b = space.random_line_through(p, rng)
    (c,) = random_boundary_points(space, rng, 1, avoid=(a, b))
    return element_at(space, a, b, c, p)


def six_chain_residual(space, e1: ChartElement, e2: ChartElement):
    """Check the chain through a third geodesic for two names of one point.

    With [a'', b''] from ``third_geodesic``: e1 moves to the chart centred
    by a'', the third line's element to the charts centred by a and a', and
    e2 to the chart centred by a''.  The two middle links must be instances
    of the intersection relation and all four names must give the same
    model point.
    """
    a2, b2, g2, r = third_geodesic(space, e1, e2)
    mid = ChartElement(a2, b2, g2, r)
    s1 = chart_transfer(space, e1, a2)
    r1 = chart_transfer(space, mid, e1.alpha)
    r2 = chart_transfer(space, mid, e2.alpha)
    t2 = chart_transfer(space, e2, a2)
    resid = 0
    for x, y in ((s1, r1), (r2, t2)):
        f, res = relate(space, x, y.alpha, y.beta)
        resid = max(resid, res, abs(compare_on_line(space, y, f)))
    p = chart_point(space, e1)
    for x in (s1, r1, r2, t2):
        resid = max(resid, space.distance(p, chart_point(space, x)))
    for dft in third_geodesic_defects(space, e1, e2, (a2, b2)):
        resid = max(resid, abs(dft))
    return resid


def certify_isometry(space, samples: int, seed: int, report=None) -> SuiteReport:
    """Check on random pairs that d_omega equals the model distance, is
    independent of the charts used, never identifies distinct points, and
    that the identification chain through a third geodesic holds."""
    rng = np.random.default_rng(seed)
    tol = tolerance(space)
    rep = report or SuiteReport("reconstruction", space.name, seed=seed,
                                tolerance=tol, claim=CERTIFY_CLAIM)
    start = time.perf_counter()
    for i in range(samples):
        try:
            _certify_one(space, rng, rep, i, tol)
        except (BoundaryError, ValueError) as exc:
            rep.samples += 1
            rep.fail(i, f"{type(exc).__name__}: {exc}")
    rep.wall_time += time.perf_counter() - start
    return rep


def _certify_one(space, rng, rep, i, tol):
    x = space.random_point(rng)
    y = space.random_point(rng)
    e1 = random_element(space, x, rng)
    e2 = random_element(space, y, rng)
    dx = space.distance(x, y)
    # (i) isometry
    d0 = d_omega(space, e1, e2)
    rep.record(i, abs(d0 - dx), f"|d_omega - d| = {float(abs(d0 - dx)):.3e}")
    # (ii) chart independence: other joins, chart centres and representatives
    values = [d0]
    extra = random_boundary_points(space, rng, 3,
                                   avoid=(e1.alpha, e1.beta, e2.alpha, e2.beta))
    for variant in (0, 1):
        join = model_join(space, e1, e2, variant)
        for g in extra:
            if any(space.boundary_equal(g, z) for z in join):
                continue
            values.append(d_omega(space, e1, e2, join=join, gamma=g))
    e1b = random_element(space, x, rng)
    e2b = random_element(space, y, rng)
    values.append(d_omega(space, e1b, e2b))
    spread = max(values) - min(values)
    rep.update(i, spread, f"chart spread {float(spread):.3e}")
    # (iii) injectivity: distinct points are never identified
    if dx > 10 * (tol or 0) + 1e-6:
        if omega_equivalent(space, e1, e2):
            rep.fail(i, "distinct points identified")
        if d0 <= tol:
            rep.fail(i, "zero distance between distinct points")
    if not omega_equivalent(space, e1, e1b):
        rep.fail(i, "two names of one point not identified")
    if not omega_equivalent(space, e1, e1.flipped()):
        rep.fail(i, "orientation flip not identified")
    # (iv) the identification chain for two names of x
    if not same_line(space, e1, e1b):
        resid = six_chain_residual(space, e1, e1b)
        rep.update(i, resid, f"chain residual {float(resid):.3e}")
