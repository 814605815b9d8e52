"""Projective model of the hyperbolic spaces KH^n.

Points are classes [x] with <x|x> < 0 and boundary points classes of null
vectors.  Representatives are kept canonical: interior points have
<x|x> = -1 and a real positive last coordinate, boundary points have last
coordinate 1 and unit spatial part.
"""

from __future__ import annotations

import math

import numpy as np

from .algebra import (
    AlgebraError,
    FormVector,
    associative_entries,
    form,
    kconj,
    kinv,
    kmul,
    knorm2,
    real_form,
    rscale,
)

NULL_TOL = 1e-10
PROJECTIVE_TOL = 1e-9
UNIT_TOL = 1e-9
REAL_TOL = 1e-10
MAX_T = 40.0
# below this value of cosh d the half-angle formula is used
_SMALL_COSH = 1.5


class GeometryError(ValueError):
    pass


def _real_unit(tag_dim):
    one = np.zeros(tag_dim)
    one[0] = 1.0
    return one


def _phase_to_positive(x):
    """Right-scale ``x`` by a unit so its last coordinate is real positive."""
    last = x[-1]
    r = math.sqrt(knorm2(last))
    if r == 0.0:
        raise GeometryError("last coordinate vanishes")
    return rscale(x, kconj(last) / r)


def canonical_point(x: np.ndarray) -> np.ndarray:
    q = -real_form(x, x)
    if not q > 0:
        raise GeometryError(f"form value {-q:g} is not negative")
    if x.shape[-1] == 8:
        return x / math.sqrt(q)
    return _phase_to_positive(x) / math.sqrt(q)


def canonical_null(x: np.ndarray) -> np.ndarray:
    last = x[-1]
    if knorm2(last) == 0.0:
        raise GeometryError("null vector with vanishing last coordinate")
    y = rscale(x, kinv(last))
    spatial = math.sqrt(float(np.sum(y[:-1] * y[:-1])))
    if abs(spatial * spatial - 1.0) > NULL_TOL * max(1.0, spatial * spatial):
        raise GeometryError(f"not a null vector: <x|x> = {spatial**2 - 1:g}")
    y = y.copy()
    y[:-1] /= spatial
    y[-1] = _real_unit(x.shape[-1])
    return y


def _null_pairing(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """<a|c> for canonical null vectors, free of cancellation for close a, c.

    The real part is -|a - c|^2 / 2 over the spatial coordinates; the
    imaginary part comes from <a|c - a>.
    """
    diff = c[:-1] - a[:-1]
    out = np.sum(kmul(kconj(a[:-1]), diff), axis=0)
    out[0] = -0.5 * float(np.sum(diff * diff))
    return out


def _abs(s: np.ndarray) -> float:
    return math.sqrt(float(np.dot(s, s)))


class HPoint:
    """Point of KH^n."""

    __slots__ = ("tag", "v")

    def __init__(self, vector: FormVector):
        if vector.tag == "O" and not associative_entries(vector.data):
            raise GeometryError("octonionic representative outside O^3_0")
        self.tag = vector.tag
        self.v = canonical_point(vector.data)

    @classmethod
    def _raw(cls, tag, v):
        p = cls.__new__(cls)
        p.tag = tag
        p.v = v
        return p

    @property
    def vector(self) -> FormVector:
        return FormVector(self.tag, self.v)

    def __eq__(self, other):
        if not isinstance(other, HPoint) or other.tag != self.tag:
            return NotImplemented
        if self.v.shape != other.v.shape:
            return False
        scale = max(1.0, float(np.max(np.abs(self.v))))
        return bool(np.max(np.abs(self.v - other.v)) <= PROJECTIVE_TOL * scale)

    __hash__ = None

    def __repr__(self):
        return f"HPoint({self.tag}, {np.round(self.v, 12).tolist()})"


class HBoundaryPoint:
    """Point of the boundary of KH^n (a null line)."""

    __slots__ = ("tag", "v")

    def __init__(self, vector: FormVector):
        if vector.tag == "O":
            raise GeometryError("octonionic boundary points are not supported")
        self.tag = vector.tag
        self.v = canonical_null(vector.data)

    @classmethod
    def _raw(cls, tag, v):
        p = cls.__new__(cls)
        p.tag = tag
        p.v = v
        return p

    @property
    def vector(self) -> FormVector:
        return FormVector(self.tag, self.v)

    def __eq__(self, other):
        if not isinstance(other, HBoundaryPoint) or other.tag != self.tag:
            return NotImplemented
        if self.v.shape != other.v.shape:
            return False
        return bool(np.max(np.abs(self.v - other.v)) <= PROJECTIVE_TOL)

    __hash__ = None

    def __repr__(self):
        return f"HBoundaryPoint({self.tag}, {np.round(self.v, 12).tolist()})"


class TangentVector:
    """Unit tangent vector ``u`` at ``base``: <x|u> = 0 and <u|u> = 1."""

    __slots__ = ("base", "u")

    def __init__(self, base: HPoint, u, check=True):
        data = u.data if isinstance(u, FormVector) else np.asarray(u, dtype=float)
        if check:
            x = base.v
            if _abs(form(x, data)) > UNIT_TOL * max(1.0, float(np.max(np.abs(x)))):
                raise GeometryError("vector is not orthogonal to the base point")
            if not _is_unit(data):
                raise GeometryError("tangent vector is not a unit vector")
        self.base = base
        self.u = data

    @property
    def tag(self):
        return self.base.tag

    def __neg__(self):
        return TangentVector(self.base, -self.u, check=False)

    def __repr__(self):
        return f"TangentVector(u={np.round(self.u, 12).tolist()})"


# -- metric -----------------------------------------------------------------

def _distance_raw(x: np.ndarray, y: np.ndarray) -> float:
    g = form(x, y)
    c = _abs(g)
    if c >= _SMALL_COSH:
        return math.acosh(c)
    # phase-align y so <x|y lam> = -|<x|y>|, then <v|v> = 4 sinh^2(d/2)
    if c == 0.0:
        raise GeometryError("degenerate pairing")
    lam = -kconj(g) / c
    v = x - rscale(y, lam)
    q = max(real_form(v, v), 0.0)
    return 2.0 * math.asinh(0.5 * math.sqrt(q))


def distance(p: HPoint, q: HPoint) -> float:
    """Hyperbolic distance from cosh^2 d = <x|y><y|x> / (<x|x><y|y>)."""
    if p.tag != q.tag:
        raise AlgebraError(f"tag mismatch: {p.tag} vs {q.tag}")
    if p.tag == "O":
        x, y = normalize_octonion_pair(p, q)
        return octonion_distance(x, y)
    return _distance_raw(p.v, q.v)


def octonion_distance(x: FormVector, y: FormVector) -> float:
    """Distance from representatives already satisfying the reality condition."""
    g = form(x.data, y.data)
    num = float(knorm2(g))
    den = real_form(x.data, x.data) * real_form(y.data, y.data)
    if not (real_form(x.data, x.data) < 0 and real_form(y.data, y.data) < 0):
        raise GeometryError("representatives must have negative form value")
    return math.acosh(max(math.sqrt(num / den), 1.0))


def normalize_octonion_pair(p: HPoint, q: HPoint):
    """Rescale representatives so that x_i and y_j are real for some i != j.

    Scalings use the conjugate of one entry, which stays inside the
    associative subalgebra generated by the entries.
    """
    x, y = p.v, q.v
    order_x = np.argsort(-knorm2(x), kind="stable")
    order_y = np.argsort(-knorm2(y), kind="stable")
    for i in order_x:
        if knorm2(x[i]) == 0:
            continue
        for j in order_y:
            if j == i or knorm2(y[j]) == 0:
                continue
            xs = rscale(x, kconj(x[i]) / math.sqrt(knorm2(x[i])))
            ys = rscale(y, kconj(y[j]) / math.sqrt(knorm2(y[j])))
            xs[i, 1:] = 0.0
            ys[j, 1:] = 0.0
            if associative_entries(xs) and associative_entries(ys):
                return FormVector(p.tag, xs), FormVector(q.tag, ys)
    raise GeometryError("reality condition cannot be achieved for this pair")


def embed_in_octonions(p: HPoint) -> HPoint:
    """Push a point of HH^2 into OH^2 through H inside O."""
    if p.tag != "H" or p.v.shape[0] != 3:
        raise GeometryError("need a point of the quaternionic plane")
    data = np.zeros((3, 8))
    data[:, :4] = p.v
    return HPoint(FormVector("O", data))


# -- geodesics --------------------------------------------------------------

def _check_t(t):
    if abs(t) > MAX_T:
        raise GeometryError(f"|t| = {abs(t):g} exceeds the cap {MAX_T:g}")


def _geodesic_raw(x, u, t):
    _check_t(t)
    # cosh t x + sinh t u through exp; |t| <= MAX_T keeps this finite
    ep, em = math.exp(t) / 2.0, math.exp(-t) / 2.0
    return (ep + em) * x + (ep - em) * u


def _is_unit(u: np.ndarray) -> bool:
    # the indefinite norm of a far-out vector rounds at eps times its euclidean size
    return abs(real_form(u, u) - 1.0) <= UNIT_TOL * max(1.0, float(np.sum(u * u)))


def geodesic_point(base: HPoint, u: TangentVector, t: float) -> HPoint:
    if not _is_unit(u.u):
        raise GeometryError("tangent vector is not a unit vector")
    y = _geodesic_raw(base.v, u.u, float(t))
    return HPoint._raw(base.tag, _phase_to_positive(y))


def endpoints(base: HPoint, u: TangentVector):
    """Backward and forward endpoints [x - u], [x + u]."""
    x = base.v
    return (HBoundaryPoint._raw(base.tag, canonical_null(x - u.u)),
            HBoundaryPoint._raw(base.tag, canonical_null(x + u.u)))


class Line:
    """Unit-speed parametrisation s -> [(a e^-s + b' e^s)/2] with <a|b'> = -2.

    ``point(s)`` tends to ``a`` as s -> -inf and to ``b`` as s -> +inf.
    """

    def __init__(self, a: HBoundaryPoint, b: HBoundaryPoint):
        if a == b:
            raise GeometryError("a line needs two distinct boundary points")
        g = _null_pairing(a.v, b.v)
        mu = -2.0 * kinv(g)
        self.tag = a.tag
        self.a = a
        self.b = b
        self._a = a.v
        self._b = rscale(b.v, mu)
        self._scale = _abs(mu)

    @property
    def ends(self):
        return self.a, self.b

    def point(self, s) -> HPoint:
        s = float(s)
        _check_t(s)
        y = (math.exp(-s) * self._a + math.exp(s) * self._b) / 2.0
        return HPoint._raw(self.tag, _phase_to_positive(y))

    def base(self) -> HPoint:
        return self.point(0.0)

    def tangent(self, s=0.0) -> TangentVector:
        p = self.point(s)
        s = float(s)
        y = (math.exp(-s) * self._a + math.exp(s) * self._b) / 2.0
        u = (math.exp(s) * self._b - math.exp(-s) * self._a) / 2.0
        # carry u along with the phase change applied to the point
        last = y[-1]
        u = rscale(u, kconj(last) / math.sqrt(knorm2(last)))
        return TangentVector(p, u, check=False)

    def locate(self, p: HPoint) -> float:
        """Parameter of the nearest point of the line to ``p``."""
        ga = _abs(form(self._a, p.v))
        gb = _abs(form(self._b, p.v))
        return 0.5 * math.log(ga / gb)

    def distance_to(self, p: HPoint) -> float:
        return _distance_raw(self.point(self.locate(p)).v, p.v)

    def center_offset(self, c: HBoundaryPoint) -> float:
        """Parameter s where (a|c) = (b|c) at point(s), from pairings alone.

        Along the line (a|c) - (b|c) = s - ln(|<a|c>| / |<b'|c>|) / 2; the
        null pairing keeps this accurate when c is close to an end.
        """
        if c == self.a or c == self.b:
            raise GeometryError("reference point is an end of the line")
        ac = _abs(_null_pairing(self._a, c.v))
        bc = _abs(_null_pairing(self.b.v, c.v)) * self._scale
        return 0.5 * math.log(ac / bc)


def line_through(a: HBoundaryPoint, b: HBoundaryPoint):
    """Base point on [a, b] and the unit tangent there pointing to b."""
    line = Line(a, b)
    return line.base(), line.tangent(0.0)


def segment_tangent(p: HPoint, q: HPoint):
    """Unit tangent at p pointing to q, and d(p, q)."""
    x, y = p.v, q.v
    g = form(x, y)
    c = _abs(g)
    d = _distance_raw(x, y)
    if d == 0.0:
        raise GeometryError("points coincide")
    yy = rscale(y, -kconj(g) / c)  # <x|yy> = -cosh d
    u = (yy - math.cosh(d) * x) / math.sinh(d)
    u = u / math.sqrt(real_form(u, u))
    return TangentVector(p, u, check=False), d


def geodesic_symmetry(o: HPoint, p):
    """Isometry fixing o and reversing geodesics through o.

    Works on points and boundary points: [y] -> [y + 2 x <x|y>].
    """
    x = o.v
    y = p.v
    z = y + 2.0 * rscale(x, form(x, y))
    if isinstance(p, HBoundaryPoint):
        return HBoundaryPoint._raw(p.tag, canonical_null(z))
    return HPoint._raw(p.tag, canonical_point(z))


def random_tangent(o: HPoint, rng) -> TangentVector:
    x = o.v
    w = rng.standard_normal(x.shape)
    w = w + rscale(x, form(x, w))
    return TangentVector(o, w / math.sqrt(real_form(w, w)), check=False)


def tangent_pairing(u: TangentVector, v: TangentVector) -> np.ndarray:
    return form(u.u, v.u)


class RealPlane:
    """Isometric copy of RH^2 spanned over R by o, u~, v~."""

    def __init__(self, o: HPoint, u: np.ndarray, v: np.ndarray):
        self.o = o
        self.u = u
        self.v = v

    def gram(self) -> np.ndarray:
        vecs = [self.u, self.v]
        return np.array([[real_form(a, b) for b in vecs] for a in vecs])

    def map_vector(self, r3) -> np.ndarray:
        """Image of (r1, r2, r3) in R^(2,1) under the linear isometry."""
        return r3[0] * self.u + r3[1] * self.v + r3[2] * self.o.v

    def point(self, r3) -> HPoint:
        return HPoint._raw(self.o.tag, canonical_point(self.map_vector(r3)))

    def boundary_point(self, angle: float) -> HBoundaryPoint:
        vec = self.map_vector((math.cos(angle), math.sin(angle), 1.0))
        return HBoundaryPoint._raw(self.o.tag, canonical_null(vec))

    def disk_point(self, z: complex) -> HPoint:
        """Point with Poincare-disk coordinate z (|z| < 1) in this plane."""
        r2 = abs(z) ** 2
        return self.point((2 * z.real / (1 - r2), 2 * z.imag / (1 - r2),
                           (1 + r2) / (1 - r2)))

    def coordinates(self, p) -> np.ndarray | None:
        """Real coordinates of a representative of ``p`` in the plane, if any."""
        y = p.v
        # align the phase of p so its pairing with o is real
        g = form(self.o.v, y)
        c = _abs(g)
        if c == 0.0:
            return None
        yy = rscale(y, -kconj(g) / c)
        basis = np.stack([self.u.ravel(), self.v.ravel(), self.o.v.ravel()], axis=1)
        coef, *_ = np.linalg.lstsq(basis, yy.ravel(), rcond=None)
        resid = np.max(np.abs(basis @ coef - yy.ravel()))
        if resid > 1e-8 * max(1.0, float(np.max(np.abs(yy)))):
            return None
        return coef

    def contains(self, p) -> bool:
        return self.coordinates(p) is not None


def real_plane_completion(o: HPoint, u: TangentVector, v: TangentVector) -> RealPlane:
    """Orthonormalise u, v inside the real span of o, u, v."""
    g = form(u.u, v.u)
    if np.max(np.abs(g[1:]), initial=0.0) > REAL_TOL:
        raise GeometryError("<u|v> is not real")
    uu = u.u
    w = v.u - g[0] * uu
    nw = real_form(w, w)
    if nw <= 1e-20:
        raise GeometryError("u and v are parallel")
    w = w / math.sqrt(nw)
    # second pass: cancellation in v - g u leaves O(eps/|w|) drift off the frame
    x = o.v
    w = w + rscale(x, form(x, w))
    w = w - rscale(uu, form(uu, w))
    return RealPlane(o, uu, w / math.sqrt(real_form(w, w)))


def bourdon_third_direction(o: HPoint, u: TangentVector, v: TangentVector) -> TangentVector:
    """Unit tangent w at o with <u|w> and <v|w> real, off the real span of u, v."""
    x = o.v
    shape = x.shape
    dim = shape[-1]
    size = x.size
    rows = []
    basis = np.eye(size)
    for k in range(size):
        e = basis[k].reshape(shape)
        rows.append(np.concatenate([
            form(x, e), form(u.u, e)[1:], form(v.u, e)[1:]]))
    # columns of the transposed map are constraints on w
    mat = np.array(rows).T
    _, sing, vt = np.linalg.svd(mat)
    rank = int(np.sum(sing > 1e-10 * max(1.0, sing[0])))
    null = vt[rank:].T  # size x k
    if null.shape[1] == 0:
        raise GeometryError("no admissible third direction")
    # remove components along u, v (real metric) to find a direction off their span
    uv = np.stack([u.u.ravel(), v.u.ravel()], axis=1)
    sig = np.repeat(np.r_[np.ones(shape[0] - 1), -1.0], dim)
    gram = uv.T @ (sig[:, None] * uv)
    coeffs = np.linalg.solve(gram, uv.T @ (sig[:, None] * null))
    resid = null - uv @ coeffs
    _, rs, rvt = np.linalg.svd(resid)
    if rs[0] > 1e-6:
        w = (null @ rvt[0]).reshape(shape)
    else:
        # solutions lie in span(u, v): only possible when <u|v> is real
        w = u.u + v.u
        if real_form(w, w) < 1e-6:
            w = u.u - v.u
    nw = real_form(w, w)
    if nw <= 0:
        raise GeometryError("degenerate third direction")
    w = w / math.sqrt(nw)
    return TangentVector(o, w, check=False)


# -- the space --------------------------------------------------------------

class HyperbolicSpace:
    """KH^n with the boundary primitives used by the uniform calculus."""

    exact = False

    def __init__(self, field: str, n: int):
        if field not in ("R", "C", "H", "O"):
            raise ValueError(f"unknown field {field!r}")
        if n < 2 or (field == "O" and n != 2):
            raise ValueError(f"invalid dimension {n} for field {field}")
        self.field = field
        self.n = n
        self.dim = {"R": 1, "C": 2, "H": 4, "O": 8}[field]
        self.tol = 1e-7 if field in ("H", "O") else 1e-8
        base = np.zeros((n + 1, self.dim))
        base[-1, 0] = 1.0
        self._origin = HPoint._raw(field, base)

    @property
    def name(self) -> str:
        return f"{self.field.lower()}h:{self.n}"

    def __repr__(self):
        return f"HyperbolicSpace({self.field!r}, {self.n})"

    def __eq__(self, other):
        return (isinstance(other, HyperbolicSpace)
                and (self.field, self.n) == (other.field, other.n))

    def __hash__(self):
        return hash((self.field, self.n))

    def _no_octonions(self):
        if self.field == "O":
            raise NotImplementedError("the octonion plane supports metric evaluation only")

    def origin(self) -> HPoint:
        return self._origin

    def distance(self, p, q) -> float:
        return distance(p, q)

    def same_point(self, p, q, tol=None) -> bool:
        return distance(p, q) <= (self.tol if tol is None else tol)

    def boundary_equal(self, a, b) -> bool:
        return a == b

    def gromov_boundary(self, o, a, b) -> float:
        """Closed form (a|b)_o = -1/2 ln(|<a|b>| / (2 |<a|x>| |<b|x>|))."""
        self._no_octonions()
        ab = _abs(_null_pairing(a.v, b.v))
        if ab == 0.0:
            raise GeometryError("boundary points coincide")
        ax = _abs(form(a.v, o.v))
        bx = _abs(form(b.v, o.v))
        if ax == 0.0 or bx == 0.0:
            raise GeometryError("pairing underflow: base point too far out for float64")
        return -0.5 * math.log(ab / (2.0 * ax * bx))

    def busemann(self, a, x, y) -> float:
        """Closed form B_a(x, y) = ln |<a|x>| - ln |<a|y>|."""
        self._no_octonions()
        return math.log(_abs(form(a.v, x.v)) / _abs(form(a.v, y.v)))

    def ray_point(self, o, a, t) -> HPoint:
        x = o.v
        g = form(x, a.v)
        aa = rscale(a.v, -kinv(g))  # <x|aa> = -1
        u = aa - x
        return geodesic_point(o, TangentVector(o, u, check=False), t)

    def line(self, a, b) -> Line:
        self._no_octonions()
        return Line(a, b)

    def join(self, p, q, avoid=()):
        """Endpoints (a, b) of the line through p and q, ordered a, p, q, b.

        The line is unique, so ``avoid`` is accepted for interface parity
        with trees and otherwise ignored.
        """
        tv, _ = segment_tangent(p, q)
        return endpoints(p, tv)

    def toward(self, p, q, t) -> HPoint:
        """Point at distance t from p on the segment [p, q]."""
        if p == q:
            return p
        tv, _ = segment_tangent(p, q)
        return geodesic_point(p, tv, t)

    def random_tangent(self, o, rng) -> TangentVector:
        return random_tangent(o, rng)

    def random_boundary(self, rng) -> HBoundaryPoint:
        self._no_octonions()
        return endpoints(self._origin, random_tangent(self._origin, rng))[1]

    def random_point(self, rng, radius=2.5) -> HPoint:
        u = random_tangent(self._origin, rng)
        return geodesic_point(self._origin, u, radius * rng.random())

    def random_line_through(self, p, rng):
        return endpoints(p, random_tangent(p, rng))
