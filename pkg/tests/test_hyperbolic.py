import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cat1boundary.algebra import FormVector, form, real_form
from cat1boundary.hyperbolic import (GeometryError, HBoundaryPoint, HPoint,
                                     HyperbolicSpace, Line, TangentVector,
                                     bourdon_third_direction, distance,
                                     embed_in_octonions, endpoints,
                                     geodesic_point, geodesic_symmetry,
                                     line_through, normalize_octonion_pair,
                                     octonion_distance, random_tangent,
                                     real_plane_completion, segment_tangent)

SPACES = [("R", 2), ("R", 3), ("C", 2), ("H", 2)]


@st.composite
def configs(draw, spaces=SPACES):
    field, n = draw(st.sampled_from(spaces))
    seed = draw(st.integers(0, 2**32 - 1))
    return HyperbolicSpace(field, n), np.random.default_rng(seed)


def test_distance_examples():
    sp = HyperbolicSpace("R", 2)
    o = sp.origin()
    assert distance(o, o) == 0.0
    u = TangentVector(o, FormVector("R", [1, 0, 0]))
    for t in (0.3, 1.0, 4.5):
        assert distance(o, geodesic_point(o, u, t)) == pytest.approx(t, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(configs())
def test_geodesics_have_unit_speed(cfg):
    sp, rng = cfg
    p = sp.random_point(rng)
    u = random_tangent(p, rng)
    s, t = rng.uniform(-5, 5, size=2)
    d = distance(geodesic_point(p, u, s), geodesic_point(p, u, t))
    assert d == pytest.approx(abs(s - t), abs=1e-9)
    assert geodesic_point(p, u, 0.0) == p


@settings(max_examples=100, deadline=None)
@given(configs())
def test_triangle_inequality_and_symmetry(cfg):
    sp, rng = cfg
    p, q, r = (sp.random_point(rng) for _ in range(3))
    assert distance(p, q) == pytest.approx(distance(q, p), abs=1e-12)
    assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9


def test_endpoints_basic():
    sp = HyperbolicSpace("R", 2)
    o = sp.origin()
    lo, hi = endpoints(o, TangentVector(o, FormVector("R", [1, 0, 0])))
    np.testing.assert_allclose(lo.v[:, 0], [-1, 0, 1])
    np.testing.assert_allclose(hi.v[:, 0], [1, 0, 1])
    for e in (lo, hi):
        assert abs(real_form(e.v, e.v)) <= 1e-15


def test_line_through_example():
    a = HBoundaryPoint(FormVector("R", [-1, 0, 1]))
    b = HBoundaryPoint(FormVector("R", [1, 0, 1]))
    base, tv = line_through(a, b)
    assert base == HPoint(FormVector("R", [0, 0, 1]))
    np.testing.assert_allclose(tv.u[:, 0], [1, 0, 0], atol=1e-12)
    base2, tv2 = line_through(b, a)
    assert base2 == base
    np.testing.assert_allclose(tv2.u, -tv.u, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(configs())
def test_line_limits_and_round_trip(cfg):
    sp, rng = cfg
    a, b = sp.random_boundary(rng), sp.random_boundary(rng)
    base, tv = line_through(a, b)
    far_b = geodesic_point(base, tv, 30.0)
    far_a = geodesic_point(base, tv, -30.0)
    # a point at distance T sits within ~2 e^{-T} of its endpoint projectively
    assert np.max(np.abs(far_b.v / far_b.v[-1, 0] - b.v)) <= 1e-9
    assert np.max(np.abs(far_a.v / far_a.v[-1, 0] - a.v)) <= 1e-9
    lo, hi = endpoints(base, tv)
    assert lo == a and hi == b


def test_line_through_nearly_coincident_ends():
    # ends 1e-4 apart: the base point is ~10 out, coordinates ~1e4
    a = HBoundaryPoint(FormVector("R", [1.0, 0.0, 1.0]))
    b = HBoundaryPoint(FormVector("R", [math.cos(1e-4), math.sin(1e-4), 1.0]))
    base, tv = line_through(a, b)
    assert base.v[-1, 0] > 5e3
    far = geodesic_point(base, tv, 30.0)
    assert np.max(np.abs(far.v / far.v[-1, 0] - b.v)) <= 1e-9
    assert endpoints(base, tv) == (a, b)


@settings(max_examples=100, deadline=None)
@given(configs())
def test_line_locate_and_distance_to(cfg):
    sp, rng = cfg
    a, b = sp.random_boundary(rng), sp.random_boundary(rng)
    line = Line(a, b)
    s = rng.uniform(-6, 6)
    p = line.point(s)
    q = line.point(s + 1.25)
    # hyperboloid coordinates at distance r from the origin carry ~eps e^{2r} error
    r = max(distance(sp.origin(), p), distance(sp.origin(), q))
    tol = 1e-12 + 1e-14 * math.exp(2 * r)
    assert line.locate(p) == pytest.approx(s, abs=tol)
    assert line.distance_to(p) <= math.sqrt(tol)
    assert distance(p, q) == pytest.approx(1.25, abs=tol)


@settings(max_examples=100, deadline=None)
@given(configs())
def test_geodesic_symmetry(cfg):
    sp, rng = cfg
    o, p = sp.random_point(rng), sp.random_point(rng)
    assert geodesic_symmetry(o, o) == o
    q = geodesic_symmetry(o, p)
    assert geodesic_symmetry(o, q) == p
    assert distance(o, q) == pytest.approx(distance(o, p), abs=1e-9)
    # o is the midpoint of [p, q]
    assert distance(p, q) == pytest.approx(2 * distance(o, p), abs=1e-8)


@settings(max_examples=100, deadline=None)
@given(configs())
def test_segment_tangent(cfg):
    sp, rng = cfg
    p, q = sp.random_point(rng), sp.random_point(rng)
    tv, d = segment_tangent(p, q)
    assert geodesic_point(p, tv, d) == q
    assert sp.toward(p, q, 0.0) == p
    mid = sp.toward(p, q, d / 2)
    assert distance(mid, q) == pytest.approx(d / 2, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(configs())
def test_projective_invariance(cfg):
    sp, rng = cfg
    p, q = sp.random_point(rng), sp.random_point(rng)
    lam = rng.standard_normal(sp.dim)
    scaled = HPoint(p.vector.scale(lam))
    assert scaled == p
    assert distance(scaled, q) == pytest.approx(distance(p, q), abs=1e-9)


def test_real_plane_completion_orthonormal():
    sp = HyperbolicSpace("C", 3)
    rng = np.random.default_rng(4)
    o = sp.origin()
    for _ in range(50):
        u = random_tangent(o, rng)
        v = _real_pairing_partner(u, rng)
        plane = real_plane_completion(o, u, v)
        np.testing.assert_allclose(plane.gram(), np.eye(2), atol=1e-12)
        for ang in rng.uniform(0, 2 * math.pi, size=4):
            assert plane.contains(plane.boundary_point(ang))
        assert plane.contains(plane.disk_point(0.3 + 0.2j))


def test_real_plane_completion_nearly_parallel():
    # v within 1e-7 of u, based away from the origin: the frame stays exact
    sp = HyperbolicSpace("R", 2)
    rng = np.random.default_rng(2947)
    for _ in range(50):
        o = sp.random_point(rng)
        u = random_tangent(o, rng)
        w = u.u + 1e-7 * random_tangent(o, rng).u
        v = TangentVector(o, w / math.sqrt(real_form(w, w)), check=False)
        plane = real_plane_completion(o, u, v)
        np.testing.assert_allclose(plane.gram(), np.eye(2), atol=1e-12)
        assert abs(real_form(plane.v, o.v)) < 1e-12
        for ang in rng.uniform(0, 2 * math.pi, size=4):
            plane.boundary_point(ang)  # raises if the image is not null


def _real_pairing_partner(u, rng):
    """A unit tangent v at u.base with <u|v> real."""
    o = u.base
    while True:
        w = random_tangent(o, rng)
        g = form(u.u, w.u)
        # subtract the imaginary part of the pairing along u . (imaginary unit)
        ui = u.u.copy()
        ui[:, 0], ui[:, 1] = -u.u[:, 1], u.u[:, 0]
        w2 = w.u - g[1] * ui
        n = real_form(w2, w2)
        if n > 1e-3:
            return TangentVector(o, w2 / math.sqrt(n))


def test_real_plane_identity_case():
    sp = HyperbolicSpace("R", 2)
    o = sp.origin()
    u = TangentVector(o, FormVector("R", [1, 0, 0]))
    v = TangentVector(o, FormVector("R", [0, 1, 0]))
    plane = real_plane_completion(o, u, v)
    np.testing.assert_array_equal(plane.u, u.u)
    np.testing.assert_array_equal(plane.v, v.u)


def test_real_plane_rejects_non_real_pairing():
    sp = HyperbolicSpace("C", 2)
    o = sp.origin()
    u = TangentVector(o, FormVector("C", [1, 0, 0]))
    v = TangentVector(o, FormVector("C", [complex(0, 1), 0, 0]))
    with pytest.raises(GeometryError):
        real_plane_completion(o, u, v)


def test_third_direction_complex_example():
    sp = HyperbolicSpace("C", 2)
    o = sp.origin()
    u = TangentVector(o, FormVector("C", [1, 0, 0]))
    v = TangentVector(o, FormVector("C", [complex(0, 1), 0, 0]))
    w = bourdon_third_direction(o, u, v)
    # a unit multiple of (0, 1, 0)
    assert np.linalg.norm(w.u[1]) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(w.u[[0, 2]])) <= 1e-12
    assert np.linalg.norm(form(u.u, w.u)[1:]) <= 1e-10
    assert np.linalg.norm(form(v.u, w.u)[1:]) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(configs())
def test_third_direction_contract(cfg):
    sp, rng = cfg
    o = sp.random_point(rng, radius=1.0)
    u, v = random_tangent(o, rng), random_tangent(o, rng)
    w = bourdon_third_direction(o, u, v)
    assert abs(real_form(w.u, w.u) - 1.0) <= 1e-9
    assert np.linalg.norm(form(o.v, w.u)) <= 1e-9
    assert np.linalg.norm(form(u.u, w.u)[1:]) <= 1e-10
    assert np.linalg.norm(form(v.u, w.u)[1:]) <= 1e-10


def test_octonion_embedding_matches_quaternionic_metric():
    sp = HyperbolicSpace("H", 2)
    rng = np.random.default_rng(12)
    for _ in range(500):
        p, q = sp.random_point(rng, radius=4.0), sp.random_point(rng, radius=4.0)
        d_oct = distance(embed_in_octonions(p), embed_in_octonions(q))
        assert d_oct == pytest.approx(distance(p, q), abs=1e-10)


def test_octonion_normalization_makes_entries_real():
    sp = HyperbolicSpace("H", 2)
    rng = np.random.default_rng(2)
    p, q = (embed_in_octonions(sp.random_point(rng)) for _ in range(2))
    x, y = normalize_octonion_pair(p, q)
    real_x = [i for i in range(3) if np.max(np.abs(x.data[i, 1:])) == 0]
    real_y = [j for j in range(3) if np.max(np.abs(y.data[j, 1:])) == 0]
    assert any(i != j for i in real_x for j in real_y)
    assert octonion_distance(x, y) == pytest.approx(distance(p, q), abs=1e-12)


def test_octonion_point_outside_associative_locus():
    # two generators always span an associative subalgebra; three need not
    data = np.zeros((3, 8))
    data[0, 1] = 0.3
    data[1, 2] = 0.3
    data[2, 0] = 1.0
    data[2, 4] = 0.2
    with pytest.raises(GeometryError):
        HPoint(FormVector("O", data))


def test_invalid_inputs():
    with pytest.raises(GeometryError):
        HPoint(FormVector("R", [1, 0, 0]))
    with pytest.raises(ValueError):
        HyperbolicSpace("O", 3)
    with pytest.raises(ValueError):
        HyperbolicSpace("R", 1)
    sp = HyperbolicSpace("R", 2)
    o = sp.origin()
    with pytest.raises(GeometryError):
        TangentVector(o, FormVector("R", [2, 0, 0]))
    a = sp.random_boundary(np.random.default_rng(0))
    with pytest.raises(GeometryError):
        Line(a, a)
    with pytest.raises(GeometryError):
        geodesic_point(o, TangentVector(o, FormVector("R", [1, 0, 0])), 50.0)
