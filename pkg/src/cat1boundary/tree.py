"""Regular trees of degree q >= 3 with unit edges, in exact arithmetic.

Vertices are reduced words over the letters 0..q-1 (no letter repeated
twice in a row), read from a base vertex o = ().  The neighbours of w are
w[:-1] and w + (c,) for c != w[-1], so every vertex has degree q.  Ends are
eventually periodic infinite reduced words prefix . period^inf.

A point of the metric tree is stored as (word, depth): it sits on the path
from o to the vertex ``word`` at distance ``depth`` from o, with
len(word) - 1 < depth <= len(word).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, gcd

MIN_DEGREE = 3
MAX_DEGREE = 8


class TreeError(ValueError):
    pass


def _reduced(word) -> bool:
    return all(a != b for a, b in zip(word, word[1:]))


def _check_letters(word, degree):
    if any(not (0 <= c < degree) for c in word):
        raise TreeError(f"letters of {word} must lie in 0..{degree - 1}")
    if not _reduced(word):
        raise TreeError(f"word {word} backtracks")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TreeError("tree coordinates must be exact (int or Fraction)")
    return Fraction(x)


@dataclass(frozen=True)
class TreePoint:
    """Point of the tree: on the path o -> ``word`` at distance ``depth``."""

    word: tuple
    depth: Fraction

    def __post_init__(self):
        word = tuple(int(c) for c in self.word)
        depth = _frac(self.depth)
        if not _reduced(word):
            raise TreeError(f"word {word} backtracks")
        if not (len(word) - 1 < depth <= len(word)) and not (word == () and depth == 0):
            raise TreeError(f"depth {depth} is not on the last edge of {word}")
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "depth", depth)

    @classmethod
    def vertex(cls, word) -> "TreePoint":
        word = tuple(word)
        return cls(word, Fraction(len(word)))

    @classmethod
    def on_edge(cls, vertex, direction, offset) -> "TreePoint":
        """Point at distance ``offset`` in [0, 1) from ``vertex`` toward a neighbour.

        ``direction`` is a letter; moving along the last letter of the
        vertex word goes back toward o.
        """
        vertex = tuple(vertex)
        offset = _frac(offset)
        if not 0 <= offset < 1:
            raise TreeError("offset must lie in [0, 1)")
        if offset == 0:
            return cls.vertex(vertex)
        if vertex and direction == vertex[-1]:
            return cls(vertex, len(vertex) - offset)
        return cls(vertex + (direction,), len(vertex) + offset)

    @property
    def is_vertex(self) -> bool:
        return self.depth == len(self.word)

    @property
    def edge_offset(self) -> Fraction:
        """Distance to the nearest vertex on the o-side (0 at vertices)."""
        return self.depth - (len(self.word) - 1) if not self.is_vertex else Fraction(0)

    def __repr__(self):
        w = "".join(map(str, self.word)) or "o"
        return f"TreePoint({w}@{self.depth})"


def _primitive(period):
    n = len(period)
    for k in range(1, n + 1):
        if n % k == 0 and period[:k] * (n // k) == period:
            return period[:k]
    return period


@dataclass(frozen=True)
class TreeEnd:
    """End prefix . period^inf; stored in canonical (shortest) form."""

    prefix: tuple
    period: tuple

    def __post_init__(self):
        prefix = tuple(int(c) for c in self.prefix)
        period = tuple(int(c) for c in self.period)
        if not period:
            raise TreeError("period must be nonempty")
        if not _reduced(prefix + period + period[:1]):
            raise TreeError(f"end {prefix}.{period}^inf backtracks")
        period = _primitive(period)
        # rotate the period into the prefix as far as possible
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1:] + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    def letter(self, i: int) -> int:
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.period[(i - p) % len(self.period)]

    def word(self, n: int) -> tuple:
        return tuple(self.letter(i) for i in range(n))

    def __repr__(self):
        pre = "".join(map(str, self.prefix))
        per = "".join(map(str, self.period))
        return f"TreeEnd({pre}({per}))"


def word_lcp(u, v) -> int:
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return n


def end_lcp(a: TreeEnd, b: TreeEnd) -> int:
    """Length of the common prefix of two distinct ends."""
    if a == b:
        raise TreeError("ends coincide")
    la, lb = len(a.period), len(b.period)
    bound = max(len(a.prefix), len(b.prefix)) + la * lb // gcd(la, lb)
    for i in range(bound + 1):
        if a.letter(i) != b.letter(i):
            return i
    raise TreeError("ends coincide")  # unreachable for canonical ends


def _word_end_lcp(word, a: TreeEnd) -> int:
    n = 0
    for i, c in enumerate(word):
        if a.letter(i) != c:
            break
        n += 1
    return n


def tree_distance(p: TreePoint, q: TreePoint) -> Fraction:
    m = min(p.depth, q.depth, word_lcp(p.word, q.word))
    return p.depth + q.depth - 2 * m


def gromov_product_ends(o: TreePoint, a: TreeEnd, b: TreeEnd) -> Fraction:
    """(a|b)_o for distinct ends: the distance from o to the line [a, b]."""
    n = end_lcp(a, b)
    h = o.depth
    la = _word_end_lcp(o.word, a)
    lb = _word_end_lcp(o.word, b)
    return h + n - min(h, la) - min(h, lb)


def _end_point(a: TreeEnd, depth) -> TreePoint:
    depth = _frac(depth)
    if depth < 0:
        raise TreeError("negative depth along an end")
    return TreePoint(a.word(ceil(depth)), depth)


class TreeSpace:
    """Regular tree of degree ``degree`` with unit edge lengths."""

    exact = True
    tol = 0

    def __init__(self, degree: int):
        if not (MIN_DEGREE <= degree <= MAX_DEGREE):
            raise TreeError(f"degree must lie in {MIN_DEGREE}..{MAX_DEGREE}")
        self.degree = degree

    @property
    def name(self) -> str:
        return f"tree:{self.degree}"

    def __repr__(self):
        return f"TreeSpace({self.degree})"

    def __eq__(self, other):
        return isinstance(other, TreeSpace) and other.degree == self.degree

    def __hash__(self):
        return hash(("tree", self.degree))

    # -- construction ---------------------------------------------------

    def vertex(self, word) -> TreePoint:
        word = tuple(word)
        _check_letters(word, self.degree)
        return TreePoint.vertex(word)

    def end(self, prefix, period) -> TreeEnd:
        _check_letters(tuple(prefix) + tuple(period), self.degree)
        return TreeEnd(tuple(prefix), tuple(period))

    def origin(self) -> TreePoint:
        return TreePoint((), Fraction(0))

    # -- metric -----------------------------------------------------------

    def distance(self, p: TreePoint, q: TreePoint) -> Fraction:
        return tree_distance(p, q)

    def same_point(self, p, q, tol=None) -> bool:
        return p == q

    def boundary_equal(self, a, b) -> bool:
        return a == b

    def gromov_boundary(self, o: TreePoint, a: TreeEnd, b: TreeEnd) -> Fraction:
        return gromov_product_ends(o, a, b)

    def busemann(self, a: TreeEnd, x: TreePoint, y: TreePoint) -> Fraction:
        far = _end_point(a, max(x.depth, y.depth) + 1)
        return self.distance(x, far) - self.distance(y, far)

    def ray_point(self, o: TreePoint, a: TreeEnd, t) -> TreePoint:
        """Point at distance t from o on the ray [o, a)."""
        t = _frac(t)
        k = _word_end_lcp(o.word, a)
        if o.depth <= k:
            return _end_point(a, o.depth + t)
        up = o.depth - k
        if t <= up:
            return self.toward(o, self.vertex(o.word[:k]), t)
        return _end_point(a, k + (t - up))

    def toward(self, p: TreePoint, q: TreePoint, t) -> TreePoint:
        """Point on the segment [p, q] at distance t from p."""
        t = _frac(t)
        d = self.distance(p, q)
        if not 0 <= t <= d:
            raise TreeError("parameter outside the segment")
        m = min(p.depth, q.depth, word_lcp(p.word, q.word))
        up = p.depth - m
        if t <= up:
            depth = p.depth - t
            return TreePoint(p.word[: ceil(depth)], depth)
        depth = m + (t - up)
        return TreePoint(q.word[: ceil(depth)], depth)

    def line(self, a: TreeEnd, b: TreeEnd) -> "TreeLine":
        return TreeLine(a, b)

    def tripod_center(self, a: TreeEnd, b: TreeEnd, c: TreeEnd) -> TreePoint:
        return self.line(a, b).point(self.line(a, b).center_offset(c))

    def end_geodesic_point(self, a: TreeEnd, b: TreeEnd, ref: TreeEnd, t) -> TreePoint:
        return end_geodesic_point(a, b, ref, t)

    # -- extensions -------------------------------------------------------

    def _tails(self, last):
        """Reduced periods, shortest first, that may follow the letter ``last``."""
        q = self.degree
        for n in itertools.count(2):
            for period in itertools.product(range(q), repeat=n):
                if period[0] == last or not _reduced(period + period[:1]):
                    continue
                if _primitive(period) != period:
                    continue
                yield period

    def extend(self, word, avoid=(), first=None) -> TreeEnd:
        """An end beginning with ``word`` (then ``first`` if given), not in ``avoid``."""
        word = tuple(word)
        if first is not None:
            if word and first == word[-1]:
                raise TreeError("extension backtracks")
            word = word + (first,)
        last = word[-1] if word else None
        for period in self._tails(last):
            end = TreeEnd(word, period)
            if all(end != e for e in avoid):
                return end
        raise TreeError("no extension found")  # unreachable

    def _children(self, word):
        return [c for c in range(self.degree) if not word or c != word[-1]]

    def away_end(self, p: TreePoint, q: TreePoint, avoid=()) -> TreeEnd:
        """An end whose ray from p leaves in a direction away from q (q != p)."""
        if p == q:
            raise TreeError("points coincide")
        m = min(p.depth, q.depth, word_lcp(p.word, q.word))
        if m < p.depth:
            # q is reached by first moving toward o; go down instead
            if p.is_vertex:
                return self.extend(p.word, avoid, first=self._children(p.word)[0])
            return self.extend(p.word, avoid)
        # q lies below p along q.word
        if p.is_vertex:
            w = p.word
            nxt = q.word[len(w)]
            c = next(c for c in self._children(w) if c != nxt)
            return self.extend(w, avoid, first=c)
        return self._upward_end(p.word, avoid)

    def _upward_end(self, word, avoid=()) -> TreeEnd:
        """An end through the parent of ``word`` that avoids ``word``."""
        parent = word[:-1]
        for c in self._children(parent):
            if c != word[-1]:
                return self.extend(parent, avoid, first=c)
        raise TreeError("tree is not thick")  # unreachable for degree >= 3

    def join(self, p: TreePoint, q: TreePoint, avoid=()):
        """Ends (a, b) of a line through p and q, ordered a, p, q, b."""
        if p == q:
            return self.line_through_point(p, avoid)
        return self.away_end(p, q, avoid), self.away_end(q, p, avoid)

    def line_through_point(self, p: TreePoint, avoid=(), choice=0):
        """Two ends a, b with p strictly inside [a, b] (p on the segment of
        their divergence), avoiding the ends in ``avoid``."""
        if p.is_vertex:
            w = p.word
            kids = self._children(w)
            c1 = kids[choice % len(kids)]
            c2 = kids[(choice + 1) % len(kids)]
            a = self.extend(w, avoid, first=c1)
            b = self.extend(w, tuple(avoid) + (a,), first=c2)
            return a, b
        a = self._upward_end(p.word, avoid)
        b = self.extend(p.word, tuple(avoid) + (a,))
        return a, b

    # -- sampling ---------------------------------------------------------

    def random_word(self, rng, max_len=4, min_len=0):
        n = int(rng.integers(min_len, max_len + 1))
        word = []
        for _ in range(n):
            c = int(rng.integers(self.degree - (1 if word else 0)))
            if word and c >= word[-1]:
                c += 1
            word.append(c)
        return tuple(word)

    def random_end(self, rng, max_prefix=4) -> TreeEnd:
        prefix = self.random_word(rng, max_prefix)
        n = int(rng.integers(2, 4))
        while True:
            period = []
            last = prefix[-1] if prefix else None
            for _ in range(n):
                c = int(rng.integers(self.degree))
                period.append(c)
            period = tuple(period)
            if (last is None or period[0] != last) and _reduced(period + period[:1]):
                return TreeEnd(prefix, period)

    random_boundary = random_end

    def random_point(self, rng, max_len=4, denominator=4) -> TreePoint:
        word = self.random_word(rng, max_len)
        if not word or rng.random() < 0.5:
            return TreePoint.vertex(word)
        k = int(rng.integers(1, denominator))
        return TreePoint(word, len(word) - Fraction(k, denominator))

    def random_line_through(self, p, rng, avoid=()):
        return self.line_through_point(p, avoid, choice=int(rng.integers(self.degree)))


class TreeLine:
    """The line [a, b]: s = 0 at the branch vertex of a and b, s -> +inf toward b."""

    def __init__(self, a: TreeEnd, b: TreeEnd):
        self.a = a
        self.b = b
        self.split = end_lcp(a, b)

    @property
    def ends(self):
        return self.a, self.b

    def point(self, s) -> TreePoint:
        s = _frac(s)
        if s >= 0:
            return _end_point(self.b, self.split + s)
        return _end_point(self.a, self.split - s)

    def base(self) -> TreePoint:
        return self.point(0)

    def locate(self, p: TreePoint) -> Fraction:
        """Parameter of the nearest point of the line to p."""
        la = _word_end_lcp(p.word, self.a)
        lb = _word_end_lcp(p.word, self.b)
        if lb > self.split:
            return min(p.depth, lb) - self.split
        if la > self.split:
            return self.split - min(p.depth, la)
        return Fraction(0)

    def distance_to(self, p: TreePoint) -> Fraction:
        return tree_distance(p, self.point(self.locate(p)))

    def contains(self, p: TreePoint) -> bool:
        return self.distance_to(p) == 0

    def center_offset(self, c: TreeEnd) -> Fraction:
        """Parameter of the point where the ray toward c leaves the line."""
        if c == self.a or c == self.b:
            raise TreeError("reference end lies on the line")
        la = end_lcp(self.a, c)
        lb = end_lcp(self.b, c)
        if lb > self.split:
            return Fraction(lb - self.split)
        if la > self.split:
            return Fraction(self.split - la)
        return Fraction(0)


def end_geodesic_point(a: TreeEnd, b: TreeEnd, ref: TreeEnd, t) -> TreePoint:
    """Point of [a, b] at signed distance t toward b from the centre of the
    tripod (a, b, ref)."""
    if a == b or a == ref or b == ref:
        raise TreeError("ends must be pairwise distinct")
    line = TreeLine(a, b)
    return line.point(line.center_offset(ref) + _frac(t))
