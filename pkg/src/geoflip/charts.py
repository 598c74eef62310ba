"""Model-space charts, star development, simplex intersection and common refinement."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from . import exact
from .complex import (ComplexError, GeometricComplex, ManifoldComplex, SimplicialComplex, VertexPool,
                      as_simplex, assemble, validate_geometric)
from .exact import Point
from .moves import _volume, refinement
from .sweep import is_strict_kernel_point

__all__ = ["Chart", "ChartError", "ManifoldComplex", "PolytopalComplex", "PolyCell", "SphericalComplex",
           "common_refinement", "develop_star", "gnomonic_project", "is_subdivision_of", "klein_geodesic_check",
           "simplex_intersection", "spherical_chart", "triangulate_polytopal", "unify_labels"]


class ChartError(ComplexError):
    pass


@dataclass(frozen=True)
class Chart:
    kind: str
    dim: int

    def contains(self, p: Point) -> bool:
        if len(p) != self.dim:
            return False
        if self.kind == "klein-ball":
            return exact.dot(p, p) < 1
        return True


# ---------------------------------------------------------------------------
# model charts


def gnomonic_project(p: Point) -> Point:
    """Radial projection of a southern-hemisphere point onto the plane x_{n+1} = -1."""
    p = exact.point(p)
    if exact.dot(p, p) != 1:
        raise ChartError("point %r is not on the unit sphere" % (p,))
    if p[-1] >= 0:
        raise ChartError("point %r is not in the open southern hemisphere" % (p,))
    return tuple(-x / p[-1] for x in p[:-1]) + (-exact.ONE,)


def klein_geodesic_check(a: Point, b: Point) -> bool:
    """Both endpoints must be strictly inside the unit ball; the chord is then the geodesic."""
    for p in (exact.point(a), exact.point(b)):
        r = exact.dot(p, p)
        if r == 1:
            raise ChartError("ideal point %r is out of scope" % (p,))
        if r > 1:
            raise ChartError("point %r is outside the Klein ball" % (p,))
    return True


def hemisphere_center(points: Sequence[Point]) -> Optional[list]:
    """A vector c with c.p >= 1 for every point, or None if no open hemisphere holds them all."""
    m = len(points[0])
    res = exact.lp_max_free([0] * m, [[-x for x in p] for p in points], [-exact.ONE] * len(points), free=range(m))
    return res.x if res.status == "optimal" else None


def spherical_chart(points: Mapping[int, Point]) -> dict:
    """Central projection of points on the unit sphere to n-dimensional chart coordinates.

    The points are projected from the origin onto the hyperplane c.x = 1 for a
    center c of an open hemisphere holding them all, then one coordinate is
    dropped.  Great circles become straight lines.
    """
    pts = {v: exact.point(p) for v, p in points.items()}
    for v, p in pts.items():
        if exact.dot(p, p) != 1:
            raise ChartError("vertex %d is not on the unit sphere" % v)
    c = hemisphere_center(list(pts.values()))
    if c is None:
        raise ChartError("the points do not fit in an open hemisphere")
    k = max(range(len(c)), key=lambda i: (abs(c[i]), -i))
    out = {}
    for v, p in pts.items():
        y = exact.scale(1 / exact.dot(c, p), p)
        out[v] = y[:k] + y[k + 1:]
    return out


@dataclass
class SphericalComplex:
    """A triangulation of a region of S^n with exact rational vertices on the sphere."""

    complex: SimplicialComplex
    coords: dict

    def __post_init__(self):
        self.coords = {int(v): exact.point(p) for v, p in self.coords.items()}


# ---------------------------------------------------------------------------
# stars


def develop_star(m, a: Iterable[int], anchor: Optional[int] = None) -> GeometricComplex:
    """Single-chart realization of st(A, m) in which geodesics are straight lines.

    Periodic complexes are developed by translating neighbours across their
    gluings; embedded Euclidean or Klein complexes are restricted in place;
    spherical complexes are projected centrally from a hemisphere holding the
    star.  The result is validated and must be strictly star-convex with
    respect to the barycenter of A.
    """
    A = as_simplex(a)
    if A not in m.complex:
        raise ChartError("simplex %r is not in the complex" % (A,))
    tops = m.complex.containing(A)
    if isinstance(m, SphericalComplex):
        used = sorted({v for s in tops for v in s})
        chart = spherical_chart({v: m.coords[v] for v in used})
        g = GeometricComplex(SimplicialComplex(tops), chart, "sphere-gnomonic", len(next(iter(chart.values()))))
    elif isinstance(m, ManifoldComplex):
        if anchor is not None and anchor not in A:
            raise ChartError("the development must be anchored at a vertex of %r" % (A,))
        try:
            chart = m.develop(tops, A[0] if anchor is None else anchor)
        except ComplexError as e:
            raise ChartError("star of %r does not develop: %s" % (A, e)) from e
        g = GeometricComplex(SimplicialComplex(tops), chart, "euclidean", m.ambient_dim)
    else:
        g = m.restrict(tops)
    rep = validate_geometric(g)
    if not rep.ok:
        raise ChartError("development of st(%r) overlaps itself: %s" % (A, rep.kinds()))
    center = exact.centroid([g.coords[v] for v in A])
    if not is_strict_kernel_point(g, center):
        raise ChartError("st(%r) is not strictly star-convex from the barycenter of A" % (A,))
    return g


def normalize_chart(g: GeometricComplex) -> GeometricComplex:
    """Translate so the lexicographically smallest vertex sits at the origin."""
    base = min(g.coords.values())
    coords = {v: exact.sub(p, base) for v, p in g.coords.items()}
    return GeometricComplex(g.complex, coords, g.model, g.ambient_dim)


# ---------------------------------------------------------------------------
# intersection


def simplex_halfspaces(pts: Sequence[Point]) -> list:
    """Inequalities ``a.x <= b`` cutting out a full-dimensional simplex."""
    out = []
    for i, p in enumerate(pts):
        rest = [q for j, q in enumerate(pts) if j != i]
        a, b = exact.hyperplane(rest)
        if exact.dot(a, p) > b:
            a, b = [-x for x in a], -b
        out.append((a, b))
    return out


def _enumerate_vertices(hs: Sequence, n: int) -> list:
    found = set()
    for combo in itertools.combinations(hs, n):
        x = exact.solve([a for a, _ in combo], [b for _, b in combo])
        if x is None:
            continue
        x = tuple(x)
        if x not in found and all(exact.dot(a, x) <= b for a, b in hs):
            found.add(x)
    return sorted(found)


def simplex_intersection(s: Sequence[Point], t: Sequence[Point]) -> list:
    """Vertices of |S| ∩ |T| for full-dimensional simplexes S, T; empty list when disjoint."""
    s = [exact.point(p) for p in s]
    t = [exact.point(p) for p in t]
    n = len(s[0])
    if len(s) != n + 1 or len(t) != n + 1:
        raise ChartError("simplex_intersection needs two full-dimensional simplexes")
    if not exact.boxes_overlap(exact.bbox(s), exact.bbox(t)):
        return []
    return _enumerate_vertices(simplex_halfspaces(s) + simplex_halfspaces(t), n)


def face_lattice(pts: Sequence[Point], hs: Sequence) -> dict:
    """All nonempty faces of the polytope conv(pts) cut out by ``hs``: vertex-index sets -> dimension."""
    d = exact.affine_rank(list(pts))
    everything = frozenset(range(len(pts)))
    facets = set()
    for a, b in hs:
        tight = frozenset(i for i, p in enumerate(pts) if exact.dot(a, p) == b)
        if tight and tight != everything and exact.affine_rank([pts[i] for i in tight]) == d - 1:
            facets.add(tight)
    lattice = {everything} | facets
    frontier = set(facets)
    while frontier:
        new = set()
        for f, g in itertools.combinations(sorted(lattice, key=sorted), 2):
            x = f & g
            if x and x not in lattice:
                new.add(x)
        lattice |= new
        frontier = new
    return {f: exact.affine_rank([pts[i] for i in f]) for f in lattice}


# ---------------------------------------------------------------------------
# polytopal complexes


@dataclass
class PolyCell:
    vertices: tuple  # vertex ids
    points: tuple  # positions in the cell's chart frame
    parents: tuple  # (top simplex of G1, top simplex of G2)
    faces: dict = field(default_factory=dict)  # frozenset of ids -> dimension

    def frame(self) -> dict:
        return dict(zip(self.vertices, self.points))


@dataclass
class PolytopalComplex:
    model: str
    ambient_dim: int
    coords: dict
    cells: list
    periods: Optional[tuple] = None

    def all_faces(self) -> dict:
        out: dict = {}
        for c in self.cells:
            out.update(c.faces)
        return out

    def is_simplicial(self) -> bool:
        return all(len(f) == d + 1 for f, d in self.all_faces().items())

    def volume(self):
        return sum((_cell_volume(c) for c in self.cells), exact.ZERO) / math.factorial(self.ambient_dim)

    def template(self) -> GeometricComplex:
        if self.periods is not None:
            return ManifoldComplex(SimplicialComplex(), {}, {}, self.periods, self.ambient_dim)
        return GeometricComplex(SimplicialComplex(), {}, self.model, self.ambient_dim)


def _cell_volume(c: PolyCell):
    temp: dict = {}
    tops, pts = _cone_cell(c, set(), lambda f, p: temp.setdefault(f, -1 - len(temp)))
    frame = c.frame()
    frame.update(pts)
    return _volume([[frame[v] for v in s] for s in tops])


def _cone_cell(c: PolyCell, keep: set, ids, picker=None):
    """Derived triangulation of one cell, keeping the faces in ``keep`` (which must be simplexes)."""
    frame = c.frame()
    by_dim: dict = {}
    for f, d in c.faces.items():
        by_dim.setdefault(d, []).append(f)
    memo: dict = {}
    points: dict = {}

    def rec(f):
        if f in memo:
            return memo[f]
        d = c.faces[f]
        if d == 0 or f in keep:
            if len(f) != d + 1:
                raise ChartError("kept face %r is not a simplex" % (sorted(f),))
            out = [tuple(sorted(f))]
        else:
            pts = [frame[v] for v in sorted(f)]
            p = picker(pts) if picker else exact.centroid(pts)
            b = ids(f, p)
            points[b] = p
            out = []
            for g in by_dim.get(d - 1, []):
                if g < f:
                    out.extend(tuple(sorted(s + (b,))) for s in rec(g))
        memo[f] = out
        return out

    tops = rec(frozenset(c.vertices))
    return tops, points


def unify_labels(g1: GeometricComplex, g2: GeometricComplex, pool: Optional[VertexPool] = None):
    """Relabel ``g2`` so vertices at a shared position carry ``g1``'s id; others get fresh ids."""
    if pool is None:
        pool = VertexPool()
        pool.register(g1)
    mapping = {v: pool.id_for(p) for v, p in g2.coords.items()}
    return g1, g2.relabel(mapping), pool


def _pair_translations(b1, b2, periods):
    if periods is None:
        yield None
        return
    ranges = []
    for l1, h1, l2, h2, per in zip(b1[0], b1[1], b2[0], b2[1], periods):
        lo = -((h2 - l1) // per) - 1
        hi = (h1 - l2) // per + 1
        ranges.append(range(int(lo), int(hi) + 1))
    for k in itertools.product(*ranges):
        yield tuple(exact.q(ki) * per for ki, per in zip(k, periods))


def common_refinement(g1: GeometricComplex, g2: GeometricComplex,
                      pool: Optional[VertexPool] = None) -> PolytopalComplex:
    """Overlay of two triangulations of the same space: cells are the full-dimensional σ ∩ τ.

    The two complexes must use the same id for every vertex position they
    share (see :func:`unify_labels`).
    """
    if g1.model != g2.model or g1.ambient_dim != g2.ambient_dim or g1.periods != g2.periods:
        raise ChartError("the complexes live in different spaces")
    n = g1.ambient_dim
    if g1.dim != n or g2.dim != n:
        raise ChartError("common refinement needs full-dimensional complexes")
    for v, p in g2.coords.items():
        if v in g1.coords and g1.coords[v] != p:
            raise ChartError("vertex %d sits at different positions in the two complexes" % v)
    if pool is None:
        pool = VertexPool()
    pool.register(g1)
    pool.register(g2)
    frames2 = [(s, pts, exact.bbox(pts)) for s, pts in g2.top_frames()]
    cells = []
    for s1, p1 in sorted(g1.top_frames()):
        b1 = exact.bbox(p1)
        h1 = simplex_halfspaces(p1)
        for s2, p2, b2 in frames2:
            for shift in _pair_translations(b1, b2, g1.periods):
                q2 = p2 if shift is None else [exact.add(p, shift) for p in p2]
                bb = b2 if shift is None else exact.bbox(q2)
                if not exact.boxes_overlap(b1, bb):
                    continue
                hs = h1 + simplex_halfspaces(q2)
                verts = _enumerate_vertices(hs, n)
                if len(verts) <= n or exact.affine_rank(verts) < n:
                    continue
                ids = [pool.id_for(g1.canonical(p)) for p in verts]
                if len(set(ids)) != len(ids):
                    raise ChartError("cell %r x %r wraps onto itself" % (s1, s2))
                order = sorted(range(len(ids)), key=lambda i: ids[i])
                vpts = [verts[i] for i in order]
                lat = face_lattice(vpts, hs)
                vids = tuple(ids[i] for i in order)
                faces = {frozenset(vids[i] for i in f): d for f, d in lat.items()}
                cells.append(PolyCell(vids, tuple(vpts), (s1, s2), faces))
    coords = {}
    for c in cells:
        for v, p in zip(c.vertices, c.points):
            coords[v] = g1.canonical(p)
    pc = PolytopalComplex(g1.model, n, coords, cells, g1.periods)
    _check_cover(pc, g1, 0)
    _check_cover(pc, g2, 1)
    return pc


def _check_cover(pc: PolytopalComplex, g: GeometricComplex, side: int) -> None:
    vol: dict = {}
    for c in pc.cells:
        vol[c.parents[side]] = vol.get(c.parents[side], exact.ZERO) + _cell_volume(c)
    for s, pts in g.top_frames():
        if vol.get(s, exact.ZERO) != abs(exact.signed_volume(pts)):
            raise ChartError("the supports differ (simplex %r is not covered exactly)" % (s,))


def triangulate_polytopal(pc: PolytopalComplex, L=None, pool: Optional[VertexPool] = None) -> GeometricComplex:
    """Derived subdivision of a polytopal complex relative to the simplicial subcomplex ``L``.

    Every face outside L is coned from its barycenter over the already
    triangulated boundary, in increasing dimension; faces in L are kept.
    """
    keep = set()
    for s in (L or ()):
        s = as_simplex(s)
        keep.update(frozenset(f) for k in range(1, len(s) + 1) for f in itertools.combinations(s, k))
    faces = pc.all_faces()
    for f in keep:
        if f not in faces:
            raise ChartError("L simplex %r is not a face of the polytopal complex" % (sorted(f),))
    template = pc.template()
    if pool is None:
        pool = VertexPool()
    pool.register_coords(pc.coords)
    ids = lambda f, p: pool.id_for(template.canonical(p))
    tops: dict = {}
    for c in pc.cells:
        cell_tops, new_pts = _cone_cell(c, keep, ids)
        frame = c.frame()
        frame.update(new_pts)
        for s in cell_tops:
            tops[s] = tuple(frame[v] for v in s)
    return assemble(template, tops)


def is_subdivision_of(fine: GeometricComplex, coarse: GeometricComplex) -> bool:
    """Every simplex of ``fine`` lies in a simplex of ``coarse`` and the supports agree (exact)."""
    try:
        refinement(coarse, fine)
    except ComplexError:
        return False
    return True
