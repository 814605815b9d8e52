"""Seeded verification suites, one per identity or theorem being checked.

A suite draws ``samples`` random configurations and records, per sample, how
far the checked identity is from holding.  Samples are split into fixed-size
shards with independent child seeds, so results do not depend on how many
workers run them.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .boundary import (BoundaryError, base_change_check, chart_point,
                       gromov_product_points, log_cross_ratio, parse_space,
                       ptolemy_defect, random_boundary_points, rh2_angle,
                       special_offset, special_point)
from .hyperbolic import (HyperbolicSpace, bourdon_third_direction, endpoints,
                         random_tangent, real_plane_completion)
from .reconstruction import (ChartElement, NotIntersecting, chi_set,
                             certify_isometry, element_at, intersection_point,
                             intersects, midpoint_check, normalize_for_chi,
                             oplus_defect, third_geodesic,
                             third_geodesic_defects, tree_four_case)
from .report import SuiteReport

SHARD_SIZE = 100
GOLDEN_BOUND = 2 * math.log((1 + math.sqrt(5)) / 2)


class SuiteError(ValueError):
    """Unknown suite or a suite that does not apply to the space."""


@dataclass(frozen=True)
class Suite:
    name: str
    claim: str
    check: object  # check(space, rng, report, sample_id, tol)
    spaces: str = "any"  # "any", "tree", "hyperbolic" or "rh2"

    def default_tolerance(self, space):
        if space.exact:
            return 0
        if self.name == "eq3-angle":
            return 1e-10
        if self.name == "thin-triangles":
            return 1e-9
        return space.tol

    def applies_to(self, space) -> bool:
        if self.spaces == "tree":
            return space.exact
        if self.spaces == "hyperbolic":
            return not space.exact
        if self.spaces == "rh2":
            return (isinstance(space, HyperbolicSpace)
                    and (space.field, space.n) == ("R", 2))
        return True


def _fmt(x) -> str:
    return f"{float(x):.3e}"


# -- sampling helpers --------------------------------------------------------------

def intersecting_pair(space, rng, coplanar=False):
    """Ends (a, b, c, d) of two lines through a common random point o."""
    o = space.random_point(rng)
    if space.exact:
        while True:
            a, b = space.random_line_through(o, rng)
            c, d = space.random_line_through(o, rng, avoid=(a, b))
            if len({a, b, c, d}) == 4:
                return o, (a, b, c, d)
    u = random_tangent(o, rng)
    v = random_tangent(o, rng)
    if coplanar:
        v = bourdon_third_direction(o, u, v)
    a, b = endpoints(o, u)
    c, d = endpoints(o, v)
    return o, (a, b, c, d)


def planar_quadruple(space, rng):
    """Two crossing lines inside an embedded real hyperbolic plane."""
    o = space.random_point(rng)
    u = random_tangent(o, rng)
    v = bourdon_third_direction(o, u, random_tangent(o, rng))
    plane = real_plane_completion(o, u, v)
    angles = np.sort(rng.uniform(0.0, 2 * math.pi, 4))
    pts = [plane.boundary_point(float(t)) for t in angles]
    # interleaved ends give crossing diagonals
    return pts[0], pts[2], pts[1], pts[3]


# -- checks -----------------------------------------------------------------------

def check_ptolemy(space, rng, rep, i, tol):
    a, b, c, d = random_boundary_points(space, rng, 4)
    if space.exact:
        # w(a,d;c,b) + w(a,c;d,b) >= 1 follows from max of the logs >= 0
        low = max(log_cross_ratio(space, a, d, c, b), log_cross_ratio(space, a, c, d, b))
        rep.record(i, max(Fraction(0), -low), f"max log ratio {low}")
        return
    defect = ptolemy_defect(space, a, b, c, d)
    rep.record(i, max(0.0, -defect), f"Ptolemy defect {_fmt(defect)}")
    a, b, c, d = planar_quadruple(space, rng)
    eq = ptolemy_defect(space, a, b, c, d)
    rep.update(i, abs(eq), f"planar equality defect {_fmt(eq)}")


def check_four_cases(space, rng, rep, i, tol):
    a, b, c, d = random_boundary_points(space, rng, 4)
    try:
        case = tree_four_case(space, a, b, c, d)
    except BoundaryError as exc:
        rep.record(i, 1, str(exc))
        return
    rep.record(i, 0)
    # oplus dichotomy against the model: the lines meet iff a special
    # point of one lies on the other
    m = max(case.log_ratios[1], case.log_ratios[2])
    meet = space.line(a, b).contains(special_point(space, c, d, a))
    if m < 0 or (m == 0) != meet or (case.label == 3) == meet:
        rep.fail(i, f"oplus dichotomy broken in {case.name}: max log {m}, meet {meet}")


def check_prop33(space, rng, rep, i, tol):
    a, b, c, d = random_boundary_points(space, rng, 4)
    lw = log_cross_ratio(space, a, b, c, d)
    line = space.line(a, b)
    sc = special_offset(space, line, c)
    sd = special_offset(space, line, d)
    dist = space.distance(line.point(sc), line.point(sd))
    rep.record(i, abs(abs(lw) - dist), f"||ln w| - d| = {_fmt(abs(abs(lw) - dist))}")
    # negative exactly when p(a,b;c) lies toward a from p(a,b;d)
    rep.update(i, abs(lw - (sc - sd)), f"signed branch off by {_fmt(abs(lw - (sc - sd)))}")
    # independence of the base point
    vals = [lw] + [log_cross_ratio(space, a, b, c, d, o=space.random_point(rng))
                   for _ in range(2)]
    rep.update(i, max(vals) - min(vals), f"base point spread {_fmt(max(vals) - min(vals))}")


def check_eq3(space, rng, rep, i, tol):
    o = space.random_point(rng)
    a, b = random_boundary_points(space, rng, 2)
    theta = rh2_angle(space, o, a, b)
    val = math.exp(-space.gromov_boundary(o, a, b))
    err = abs(val - math.sin(theta / 2))
    rep.record(i, err, f"|d_o - sin(theta/2)| = {_fmt(err)}")


def check_base_change(space, rng, rep, i, tol):
    x, y = space.random_point(rng), space.random_point(rng)
    a, b = random_boundary_points(space, rng, 2)
    method = "closed" if space.exact else "limit"
    r = base_change_check(space, x, y, a, b, method=method)
    rep.record(i, r, f"base change residual {_fmt(r)}")
    if not space.exact:
        r2 = base_change_check(space, x, y, a, b, method="closed")
        rep.update(i, r2, f"closed-form residual {_fmt(r2)}")


def check_thin_triangles(space, rng, rep, i, tol):
    if space.exact:
        x, y, z = (space.random_point(rng) for _ in range(3))
    else:
        x, y, z = (space.random_point(rng, radius=6.0) for _ in range(3))
    g = gromov_product_points(space, x, y, z)
    worst = 0
    fractions = (1,) if space.exact else (1.0, float(rng.random()))
    for f in fractions:
        t = g * f
        p = space.toward(x, y, t)
        q = space.toward(x, z, t)
        worst = max(worst, space.distance(p, q))
    if space.exact:
        rep.record(i, worst, f"insize distance {worst}")
    else:
        excess = max(0.0, worst - GOLDEN_BOUND)
        rep.record(i, excess, f"d(p, q) = {worst:.6f} exceeds 2 ln phi")


def _model_intersection(space, a, b, c, d):
    try:
        return intersection_point(space, a, b, c, d, tol=1e-6)
    except NotIntersecting:
        return None


def check_intersect(space, rng, rep, i, tol):
    if space.exact:
        a, b, c, d = random_boundary_points(space, rng, 4)
        meet = space.line(a, b).contains(special_point(space, c, d, a))
        got = intersects(space, a, b, c, d)
        rep.record(i, 0 if got == meet else 1, f"oplus says {got}, model says {meet}")
        return
    # a constructed crossing inside a real plane must be detected
    o, q = intersecting_pair(space, rng, coplanar=True)
    dft = oplus_defect(space, *q)
    rep.record(i, abs(dft), f"coplanar crossing defect {_fmt(dft)}")
    # random lines: a positive answer must be a real intersection
    a, b, c, d = random_boundary_points(space, rng, 4)
    if intersects(space, a, b, c, d, tol=tol):
        if _model_intersection(space, a, b, c, d) is None:
            rep.fail(i, "oplus condition holds for disjoint lines")
    elif space.field == "R" and _model_intersection(space, a, b, c, d) is not None:
        rep.fail(i, "crossing real lines missed")


def check_chi(space, rng, rep, i, tol):
    o, q = intersecting_pair(space, rng, coplanar=True)
    nq = normalize_for_chi(space, *q)
    A, B, C, D = nq
    chi = chi_set(space, A, B, C, D)
    if space.exact:
        lo, hi = chi.lo, chi.hi
        bad = 0
        for s in (lo, (lo + hi) / 2, hi):
            if chart_point(space, ChartElement(A, B, C, s)) != chart_point(
                    space, ChartElement(C, D, A, s)):
                bad = 1
        # the interval is the whole overlap: just outside it the lines part
        cd = space.line(C, D)
        for s in (lo - Fraction(1, 4), hi + Fraction(1, 4)):
            if cd.contains(chart_point(space, ChartElement(A, B, C, s))):
                bad = 1
        # the sampled common point lies in the interval
        s_o = element_at(space, A, B, C, o).t
        if not chi.contains(s_o):
            bad = 1
        rep.record(i, bad, "shared coordinates differ from the overlap")
        return
    s = chi.value
    p1 = chart_point(space, ChartElement(A, B, C, s))
    p2 = chart_point(space, ChartElement(C, D, A, s))
    err = max(space.distance(p1, o), space.distance(p2, o))
    rep.record(i, err, f"chi point off the intersection by {_fmt(err)}")


def check_midpoint(space, rng, rep, i, tol):
    o, q = intersecting_pair(space, rng, coplanar=False)
    r = midpoint_check(space, *q, o=o)
    rep.record(i, r, f"midpoint residual {_fmt(r)}")


def check_third_geodesic(space, rng, rep, i, tol):
    o, (a, b, c, d) = intersecting_pair(space, rng)
    g1, g2 = random_boundary_points(space, rng, 2, avoid=(a, b, c, d))
    e1 = element_at(space, a, b, g1, o)
    e2 = element_at(space, c, d, g2, o)
    try:
        third = third_geodesic(space, e1, e2)
    except BoundaryError as exc:
        rep.record(i, 1, f"unresolved: {exc}")
        return
    defects = third_geodesic_defects(space, e1, e2, third)
    worst = max(abs(x) for x in defects)
    p = chart_point(space, ChartElement(*third))
    worst = max(worst, space.distance(p, o))
    rep.record(i, worst, f"third geodesic defects {[_fmt(x) for x in defects]}")


SUITES = {s.name: s for s in [
    Suite("ptolemy", "Ptolemy inequality for cross ratios, with equality for "
          "crossing lines in an embedded real plane", check_ptolemy),
    Suite("four-cases", "four distinct tree ends fall in exactly one of four "
          "cross-ratio cases, matching the special-point pattern",
          check_four_cases, "tree"),
    Suite("prop33", "|ln w(a,b;c,d)| is the distance between p(a,b;c) and "
          "p(a,b;d), negative when p(a,b;c) lies toward a", check_prop33),
    Suite("eq3-angle", "Bourdon distance at o equals sin of half the angle at o "
          "in the real hyperbolic plane", check_eq3, "rh2"),
    Suite("base-change", "(a|b)_y = (a|b)_x - (B_a(x,y) + B_b(x,y)) / 2",
          check_base_change),
    Suite("thin-triangles", "points at equal distance up to (y|z)_x along two "
          "sides are within 2 ln(golden ratio); 0 in trees",
          check_thin_triangles),
    Suite("intersect", "two lines meet iff w(a,c;d,b) (+) w(a,d;c,b) = 1",
          check_intersect),
    Suite("chi", "shared chart coordinates of crossing lines are |ln w|/2, "
          "or the interval [0, |ln w|] in trees", check_chi),
    Suite("midpoint", "the crossing point of [a,b] and [c,d] is the midpoint of "
          "p(a,b;c) and p(a,b;d)", check_midpoint, "hyperbolic"),
    Suite("third-geodesic", "two lines through a point admit a third line "
          "through it meeting both under the oplus condition",
          check_third_geodesic),
    Suite("reconstruction", "the chart model with d_omega is isometric to the "
          "space", None),
]}


def get_suite(name: str) -> Suite:
    if name not in SUITES:
        raise SuiteError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return SUITES[name]


def _run_shard(args):
    name, space_spec, n, seed_state, tol, shard_index = args
    suite = get_suite(name)
    space = parse_space(space_spec)
    rng = np.random.default_rng(seed_state)
    rep = SuiteReport(name, space.name, tolerance=tol, claim=suite.claim)
    offset = shard_index * SHARD_SIZE
    start = time.perf_counter()
    if suite.check is None:
        sub = certify_isometry(space, n, int(rng.integers(2**63)))
        rep.samples = sub.samples
        rep.max_violation = sub.max_violation
        rep.failures = [(offset + k, msg) for k, msg in sub.failures]
    else:
        for k in range(n):
            before = rep.samples
            try:
                suite.check(space, rng, rep, offset + k, tol)
            except (BoundaryError, ValueError) as exc:
                if rep.samples == before:
                    rep.samples += 1
                rep.fail(offset + k, f"{type(exc).__name__}: {exc}")
    rep.wall_time = time.perf_counter() - start
    return rep


def run_suite(name: str, space_spec: str, samples: int, seed: int,
              tolerance=None, workers: int = 1) -> SuiteReport:
    """Run a suite deterministically in shards and merge the shard reports."""
    suite = get_suite(name)
    space = parse_space(space_spec)
    if not suite.applies_to(space):
        raise SuiteError(f"suite {name!r} does not apply to {space.name}")
    if samples < 1:
        raise SuiteError("samples must be at least 1")
    tol = suite.default_tolerance(space) if tolerance is None else tolerance
    n_shards = -(-samples // SHARD_SIZE)
    seeds = np.random.SeedSequence(seed).spawn(n_shards)
    jobs = [(name, space.name, min(SHARD_SIZE, samples - k * SHARD_SIZE),
             seeds[k], tol, k) for k in range(n_shards)]
    start = time.perf_counter()
    if workers > 1 and n_shards > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_shard, jobs))
    else:
        parts = [_run_shard(job) for job in jobs]
    out = SuiteReport(name, space.name, seed=seed, tolerance=tol, claim=suite.claim)
    for part in parts:
        out = out.merge(part)
    out.seed = seed
    out.wall_time = time.perf_counter() - start
    return out
