"""Plot data for configurations of lines and special points.

Real hyperbolic plane: Poincare disk coordinates.  Trees: a planar layout in
which a vertex at depth k sits at radius k and each child gets an equal share
of its parent's angular sector.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np

from .boundary import (chart_point, parse_space, special_point,
                       ChartElement)
from .hyperbolic import HBoundaryPoint, HPoint, HyperbolicSpace
from .algebra import FormVector
from .reconstruction import chi_set, normalize_for_chi
from .tree import TreePoint

KINDS = ("geodesic", "special_point", "chi_set")
DISK_SAMPLES = 81
TREE_DEPTH = 7


class SceneError(ValueError):
    pass


# -- boundary point specs -----------------------------------------------------

def parse_boundary(space, spec):
    """An angle or [x1, x2] on the circle (RH^2); {"prefix", "period"} or
    [prefix, period] for a tree end."""
    if space.exact:
        if isinstance(spec, dict):
            prefix, period = spec.get("prefix", []), spec.get("period")
        elif isinstance(spec, (list, tuple)) and len(spec) == 2:
            prefix, period = spec
        else:
            raise SceneError(f"bad tree end {spec!r}")
        if not period:
            raise SceneError("a tree end needs a nonempty period")
        try:
            return space.end(tuple(prefix), tuple(period))
        except ValueError as exc:
            raise SceneError(str(exc)) from exc
    if isinstance(spec, (int, float)):
        x1, x2 = math.cos(spec), math.sin(spec)
    elif isinstance(spec, (list, tuple)) and len(spec) == 2:
        x1, x2 = float(spec[0]), float(spec[1])
        r = math.hypot(x1, x2)
        if r == 0:
            raise SceneError("boundary coordinates must be nonzero")
        x1, x2 = x1 / r, x2 / r
    else:
        raise SceneError(f"bad boundary point {spec!r}")
    return HBoundaryPoint(FormVector("R", [x1, x2, 1.0]))


# -- layouts ---------------------------------------------------------------------

def disk(p) -> list:
    """Poincare disk coordinates of a point or boundary point of RH^2."""
    v = p.v[:, 0]
    if isinstance(p, HPoint):
        return [float(v[0] / (1 + v[2])), float(v[1] / (1 + v[2]))]
    return [float(v[0] / v[2]), float(v[1] / v[2])]


def _tree_angle(degree, word):
    lo, hi = 0.0, 2 * math.pi
    for i, c in enumerate(word):
        k = degree if i == 0 else degree - 1
        slot = c if i == 0 or c < word[i - 1] else c - 1
        width = (hi - lo) / k
        lo, hi = lo + slot * width, lo + (slot + 1) * width
    return (lo + hi) / 2


def tree_xy(degree, p: TreePoint) -> list:
    """Layout position; edge points interpolate between the two vertices."""
    w = p.word
    a = _tree_angle(degree, w)
    end = [len(w) * math.cos(a), len(w) * math.sin(a)]
    if p.is_vertex:
        return end
    b = _tree_angle(degree, w[:-1])
    start = [(len(w) - 1) * math.cos(b), (len(w) - 1) * math.sin(b)]
    f = float(p.depth - (len(w) - 1))
    return [start[0] + f * (end[0] - start[0]), start[1] + f * (end[1] - start[1])]


def _polyline(space, a, b) -> list:
    line = space.line(a, b)
    if space.exact:
        base = max(len(a.prefix), len(b.prefix)) + TREE_DEPTH
        lo, hi = -(base - line.split), base - line.split
        pts = [line.point(Fraction(s)) for s in range(int(lo), int(hi) + 1)]
        return [tree_xy(space.degree, p) for p in pts]
    ss = np.linspace(-9.0, 9.0, DISK_SAMPLES)
    return [disk(a)] + [disk(line.point(s)) for s in ss] + [disk(b)]


def _place(space, p) -> list:
    return tree_xy(space.degree, p) if space.exact else disk(p)


# -- records --------------------------------------------------------------------

def render_record(space, rec) -> dict:
    if not isinstance(rec, dict) or rec.get("kind") not in KINDS:
        raise SceneError(f"record needs a kind in {KINDS}: {rec!r}")
    kind = rec["kind"]
    need = {"geodesic": 2, "special_point": 3, "chi_set": 4}[kind]
    specs = rec.get("ends")
    if not isinstance(specs, list) or len(specs) != need:
        raise SceneError(f"{kind} needs {need} boundary points")
    ends = [parse_boundary(space, s) for s in specs]
    out = {"kind": kind, "label": str(rec.get("label", ""))}
    try:
        if kind == "geodesic":
            out["polyline"] = _polyline(space, *ends)
        elif kind == "special_point":
            out["lines"] = [_polyline(space, ends[0], ends[1])]
            out["point"] = _place(space, special_point(space, *ends))
        else:
            q = normalize_for_chi(space, *ends)
            chi = chi_set(space, *q)
            A, B, C, _ = q
            out["lines"] = [_polyline(space, ends[0], ends[1]),
                            _polyline(space, ends[2], ends[3])]
            out["interval"] = [float(chi.lo), float(chi.hi)]
            out["points"] = [_place(space, chart_point(space, ChartElement(A, B, C, s)))
                             for s in sorted({chi.lo, chi.hi})]
    except ValueError as exc:
        raise SceneError(f"{kind}: {exc}") from exc
    return out


def render_scene(space, records) -> dict:
    if not isinstance(records, list):
        raise SceneError("a scenario is a list of records")
    if not (space.exact or (isinstance(space, HyperbolicSpace)
                            and (space.field, space.n) == ("R", 2))):
        raise SceneError("scenes are drawn in rh:2 or in a tree")
    return {"space": space.name,
            "coordinates": "tree-layout" if space.exact else "poincare-disk",
            "items": [render_record(space, r) for r in records]}


# -- builtin scenarios --------------------------------------------------------------

def builtin(name: str, space) -> list:
    if name == "fig2":
        # three ends; the special point is the centre of their tripod
        if space.exact:
            ends = [[[0], [1, 2]], [[1], [0, 2]], [[2], [0, 1]]]
        else:
            ends = [math.pi / 2, math.pi * 7 / 6, math.pi * 11 / 6]
        return ([{"kind": "geodesic", "ends": [ends[i], ends[j]]}
                 for i, j in ((0, 1), (1, 2), (0, 2))]
                + [{"kind": "special_point", "ends": ends, "label": "p(a,b;c)"}])
    if name == "fig4":
        if space.exact:
            raise SceneError("fig4 shows the real hyperbolic plane")
        a, b = math.pi, 0.0
        cases = {"w<1": (2.2, -1.2), "w>1": (0.9, -2.5), "w=1": (math.pi / 2, -math.pi / 2)}
        recs = []
        for label, (c, d) in cases.items():
            recs.append({"kind": "special_point", "ends": [a, b, c], "label": label})
            recs.append({"kind": "chi_set", "ends": [a, b, c, d], "label": label})
        return recs
    raise SceneError(f"unknown builtin scenario {name!r}")


def load_scenario(path_or_name: str, space) -> list:
    if path_or_name in ("fig2", "fig4"):
        return builtin(path_or_name, space)
    try:
        with open(path_or_name) as fh:
            text = fh.read()
    except OSError as exc:
        raise SceneError(f"cannot read scenario: {exc}") from exc
    if not text.strip():
        return []
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"malformed scenario: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("records")
    return data


def emit_scene(space_spec: str, scenario: str, out_path=None) -> str:
    space = parse_space(space_spec)
    text = json.dumps(render_scene(space, load_scenario(scenario, space)), indent=1) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    return text
