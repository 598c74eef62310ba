"""Cone-and-sweep flip extraction.

Two triangulations of a strictly star-convex flat polyhedron are coned to a
common apex one dimension up.  Once the cone is regular, its top simplexes
can be peeled off one at a time from above; every peel projects to a
bistellar move on the base, so each cone yields a flip sequence between its
projected upper boundary and its base.  Both cones have the same upper
boundary, which glues the two sequences together.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

from . import exact
from .complex import (ComplexError, GeometricComplex, Simplex, SimplicialComplex, VertexPool, as_simplex,
                      complexes_equal, faces, fingerprint, minus, union, validate_geometric)
from .exact import Point
from .moves import (BISTELLAR, FlipSequence, MoveError, concatenate, derived_subdivision, invert_sequence,
                    record)
from .regularity import RegularityError, RegularizeExhausted, find_heights, is_regular

log = logging.getLogger(__name__)


class SweepError(ComplexError):
    pass


class VerticalFacetError(SweepError):
    """A codimension-one face projects to a lower-dimensional set."""

    def __init__(self, simplex: Simplex):
        super().__init__("vertical face %r" % (simplex,))
        self.simplex = simplex


@dataclass
class Cobordism:
    complex: GeometricComplex
    apex: int
    base_fingerprint: str
    base: Optional[GeometricComplex] = None


@dataclass
class SweepState:
    remaining: set
    upper_boundary: set
    emitted: list = field(default_factory=list)


@dataclass
class StarConvexPolyhedron:
    complex: GeometricComplex
    star_center: Point

    def check(self) -> bool:
        return is_strict_kernel_point(self.complex, self.star_center)


@dataclass
class SweepResult:
    sequence: FlipSequence
    start: GeometricComplex
    end: GeometricComplex
    log: list  # (simplex, vertical derivative)


# ---------------------------------------------------------------------------
# polyhedron helpers


def boundary_halfspaces(g: GeometricComplex) -> list:
    """``(facet, a, b)`` with ``a.x <= b`` on the side of |g| near each boundary facet."""
    out = []
    for f, cof in sorted(g.complex.facet_cofaces().items()):
        if len(cof) != 1:
            continue
        (s,) = cof
        (v,) = set(s) - set(f)
        a, b = exact.hyperplane([g.coords[u] for u in f])
        if exact.dot(a, g.coords[v]) > b:
            a, b = [-x for x in a], -b
        out.append((f, a, b))
    return out


def is_strict_kernel_point(g: GeometricComplex, x: Point) -> bool:
    """True iff |g| is strictly star-convex with respect to ``x``.

    For a flat polyhedron this holds exactly when ``x`` lies strictly inside
    the half-space of every boundary facet.
    """
    x = exact.point(x)
    return all(exact.dot(a, x) < b for _, a, b in boundary_halfspaces(g))


def kernel_point(g: GeometricComplex) -> Optional[Point]:
    """A point in the open kernel of |g|, or None when |g| is not strictly star-convex."""
    hs = boundary_halfspaces(g)
    n = g.ambient_dim
    if not hs:
        return exact.centroid([g.coords[v] for v in g.vertices])
    a_ub = [list(a) + [exact.ONE] for _, a, _ in hs] + [[exact.ZERO] * n + [exact.ONE]]
    b_ub = [b for _, _, b in hs] + [exact.ONE]
    res = exact.lp_max_free([0] * n + [1], a_ub, b_ub, free=range(n))
    if res.status != "optimal" or res.value <= 0:
        return None
    return tuple(res.x[:n])


# ---------------------------------------------------------------------------
# cones


def _containing_top(g: GeometricComplex, x: Point, open_: bool = True) -> Optional[Simplex]:
    test = exact.in_open_simplex if open_ else exact.in_closed_simplex
    for s in sorted(g.complex.maximal):
        if test(x, g.points(s)):
            return s
    return None


def cone(g: GeometricComplex, apex_base: Point, height=1, apex_id: Optional[int] = None) -> Cobordism:
    """The cone a * G in one dimension higher, with a = (apex_base, height) and G at height 0."""
    if g.periods is not None:
        raise SweepError("cone a developed chart, not a periodic complex")
    if g.dim != g.ambient_dim:
        raise SweepError("the base must be full-dimensional")
    height = exact.q(height)
    if height <= 0:
        raise SweepError("apex height must be positive")
    x = exact.point(apex_base)
    if _containing_top(g, x) is None:
        raise SweepError("apex projection %r is not interior to a top simplex" % (x,))
    a = g.next_vertex_id() if apex_id is None else apex_id
    if a in g.coords:
        raise SweepError("apex id %d is a base vertex" % a)
    coords = {v: p + (exact.ZERO,) for v, p in g.coords.items()}
    coords[a] = x + (height,)
    tops = [union(s, (a,)) for s in g.complex.maximal]
    cx = GeometricComplex(SimplicialComplex._trusted(tops), coords, "euclidean", g.ambient_dim + 1)
    for s in tops:
        if not exact.affinely_independent(cx.points(s)):
            raise SweepError("degenerate cone simplex %r" % (s,))
    return Cobordism(cx, a, fingerprint(g), g)


def project(p: Point) -> Point:
    return p[:-1]


def _graph_side(fpts: Sequence[Point], v: Point) -> int:
    """Sign of the height of ``v`` above the hyperplane through ``fpts`` (a graph over the base)."""
    base = [project(p) for p in fpts]
    lam = exact.barycentric(project(v), base)
    if lam is None:
        raise SweepError("vertical face")
    return exact.sign(v[-1] - sum((l * p[-1] for l, p in zip(lam, fpts)), exact.ZERO))


def facet_sides(g: GeometricComplex, s: Simplex) -> tuple[set, set]:
    """Split the facets of the top simplex ``s`` into upper and lower ones.

    A facet is upper when the simplex lies below it, i.e. the opposite vertex
    is below the facet's hyperplane.
    """
    upper, lower = set(), set()
    for v in s:
        f = minus(s, (v,))
        fpts = g.points(f)
        if not exact.affinely_independent([project(p) for p in fpts]):
            raise VerticalFacetError(f)
        (upper if _graph_side(fpts, g.coords[v]) < 0 else lower).add(f)
    return upper, lower


def upper_boundary(g: GeometricComplex) -> SimplicialComplex:
    """Boundary facets of the solid ``g`` that have the solid below them, with their faces."""
    if not g.complex.is_pure or g.dim != g.ambient_dim:
        raise SweepError("upper boundary needs a pure full-dimensional complex")
    out = []
    for f, cof in g.complex.facet_cofaces().items():
        if len(cof) != 1:
            continue
        (s,) = cof
        (v,) = set(s) - set(f)
        fpts = g.points(f)
        if not exact.affinely_independent([project(p) for p in fpts]):
            raise VerticalFacetError(f)
        if _graph_side(fpts, g.coords[v]) < 0:
            out.append(f)
    return SimplicialComplex._trusted(out)


def vertical_derivative(sigma_pts: Sequence[Point], h: Sequence) -> exact.Q:
    """Last-coordinate slope of the affine function taking the values ``h`` at the vertices."""
    rows = [list(p) + [exact.ONE] for p in sigma_pts]
    if len(rows) != len(rows[0]):
        raise SweepError("need a full-dimensional simplex")
    sol = exact.solve(rows, [exact.q(x) for x in h])
    if sol is None:
        raise SweepError("degenerate simplex")
    return sol[-2]


def projected(g: GeometricComplex, tops) -> GeometricComplex:
    """Vertical projection of a set of n-simplexes of ``g`` (ids kept)."""
    tops = list(tops)
    used = {v for s in tops for v in s}
    coords = {v: project(g.coords[v]) for v in used}
    return GeometricComplex(SimplicialComplex._trusted(tops), coords, "euclidean", g.ambient_dim - 1)


# ---------------------------------------------------------------------------
# the sweep


def sweep_flips(c: Cobordism, h: Mapping[int, object], check: str = "local") -> SweepResult:
    """Peel the cobordism from above, recording one projected bistellar move per simplex.

    Simplexes are removed in non-increasing order of vertical derivative;
    among equal derivatives the lexicographically first removable one goes
    next.  Removing sigma with upper facets opposite S and lower facets
    opposite T = sigma - S is the move kappa(T, S) on the projected upper
    boundary.  With ``check="full"`` the projected complex is revalidated
    after every move; the default relies on the initial validation plus the
    local retriangulation check of each move, which preserves injectivity.
    """
    g = c.complex
    if not is_regular(g, h):
        raise RegularityError("heights are not strictly convex on the cobordism")
    sides = {s: facet_sides(g, s) for s in g.complex.maximal}
    deriv = {s: vertical_derivative(g.points(s), [h[v] for v in s]) for s in g.complex.maximal}
    ub = set(upper_boundary(g).maximal)
    state = SweepState(set(g.complex.maximal), set(ub))
    cur = projected(g, ub)
    rep = validate_geometric(cur)
    if not rep.ok:
        raise SweepError("projection of the upper boundary is not injective: %s" % rep.kinds())
    start = cur
    entries = []
    order = sorted(g.complex.maximal, key=lambda s: (-deriv[s], s))
    for d, group in itertools.groupby(order, key=lambda s: deriv[s]):
        pending = list(group)
        while pending:
            pick = next((s for s in pending if sides[s][0] <= state.upper_boundary), None)
            if pick is None:
                raise SweepError("no removable simplex among %d with derivative %s"
                                 % (len(pending), exact.fmt(d)))
            pending.remove(pick)
            upper, lower = sides[pick]
            S = as_simplex(v for v in pick if minus(pick, (v,)) in upper)
            T = minus(pick, S)
            a = project(g.coords[S[0]]) if len(S) == 1 else None
            try:
                cur, mv = record(cur, BISTELLAR, T, S, a=a, vertex=S[0] if len(S) == 1 else None)
            except MoveError as e:
                raise SweepError("peeling %r: %s" % (pick, e)) from e
            state.upper_boundary = (state.upper_boundary - upper) | lower
            state.remaining.discard(pick)
            state.emitted.append(mv)
            entries.append((pick, d))
            if check == "full":
                rep = validate_geometric(cur)
                if not rep.ok:
                    raise SweepError("injectivity lost after peeling %r: %s" % (pick, rep.kinds()))
    if c.base is not None and not complexes_equal(cur, c.base):
        raise SweepError("sweep did not end at the base")
    seq = FlipSequence(state.emitted, fingerprint(start), fingerprint(cur), None, dict(start.coords))
    return SweepResult(seq, start, cur, entries)


def format_log(entries) -> list[str]:
    return ["%s %s" % (" ".join(map(str, s)), exact.fmt(d)) for s, d in entries]


# ---------------------------------------------------------------------------
# connecting two triangulations of a star-convex polyhedron


def _boundary_facets(g: GeometricComplex) -> set:
    return {f for f, cof in g.complex.facet_cofaces().items() if len(cof) == 1}


def _codim2_planes(g: GeometricComplex) -> list:
    """Spanning points of every codimension-one face."""
    return [[g.coords[v] for v in f] for f in g.complex.of_dim(g.ambient_dim - 1)]


def _generic(x: Point, face_pts: Sequence[Sequence[Point]]) -> bool:
    """``x`` avoids the affine hull of every listed face."""
    for pts in face_pts:
        if exact.affine_rank(list(pts) + [x]) == exact.affine_rank(list(pts)):
            return False
    return True


def _pair_lp(n, p1, p2, hs):
    """Maximise t with x at barycentric depth >= t in both simplexes and t-deep in the kernel."""
    # variables: x (n, free), l1 (n+1), l2 (n+1), t
    nv = n + 2 * (n + 1) + 1
    t = nv - 1
    a_eq, b_eq = [], []
    for off, pts in ((n, p1), (2 * n + 1, p2)):
        for i in range(n):
            row = [exact.ZERO] * nv
            row[i] = exact.ONE
            for j, p in enumerate(pts):
                row[off + j] = -p[i]
            a_eq.append(row)
            b_eq.append(exact.ZERO)
        row = [exact.ZERO] * nv
        for j in range(n + 1):
            row[off + j] = exact.ONE
        a_eq.append(row)
        b_eq.append(exact.ONE)
    a_ub, b_ub = [], []
    for j in range(n, nv - 1):
        row = [exact.ZERO] * nv
        row[j] = -exact.ONE
        row[t] = exact.ONE
        a_ub.append(row)
        b_ub.append(exact.ZERO)
    for _, a, b in hs:
        row = list(a) + [exact.ZERO] * (nv - n)
        row[t] = exact.ONE
        a_ub.append(row)
        b_ub.append(b)
    row = [exact.ZERO] * nv
    row[t] = exact.ONE
    a_ub.append(row)
    b_ub.append(exact.ONE)
    c = [0] * nv
    c[t] = 1
    res = exact.lp_max_free(c, a_ub, b_ub, a_eq, b_eq, free=range(n))
    if res.status != "optimal" or res.value <= 0:
        return None
    return tuple(res.x[:n])


def apex_projection(g1: GeometricComplex, g2: GeometricComplex) -> Point:
    """A generic point interior to a top simplex of each complex and to the kernel of |g1|.

    Generic means off the affine hull of every codimension-one face of both
    complexes, so that no face of either cone projects degenerately.
    """
    n = g1.ambient_dim
    hs = boundary_halfspaces(g1)
    center = kernel_point(g1)
    if center is None:
        raise SweepError("the polyhedron is not strictly star-convex")
    avoid = _codim2_planes(g1) + _codim2_planes(g2)
    first = lambda g: [s for s in sorted(g.complex.maximal) if exact.in_closed_simplex(center, g.points(s))]
    c1, c2 = first(g1), first(g2)
    pairs = [(s1, s2) for s1 in c1 for s2 in c2]
    boxes2 = {s: exact.bbox(g2.points(s)) for s in g2.complex.maximal}
    for s1 in sorted(g1.complex.maximal):
        b1 = exact.bbox(g1.points(s1))
        for s2 in sorted(g2.complex.maximal):
            if (s1, s2) not in pairs and exact.boxes_overlap(b1, boxes2[s2]):
                pairs.append((s1, s2))
    dirs = [tuple(exact.q(1) / (k + 2) ** i for i in range(n)) for k in range(3)]
    dirs += [tuple(exact.ONE if i == j else exact.ZERO for i in range(n)) for j in range(n)]
    for s1, s2 in pairs:
        p1, p2 = g1.points(s1), g2.points(s2)
        x = _pair_lp(n, p1, p2, hs)
        if x is None:
            continue
        ok = lambda y: (exact.in_open_simplex(y, p1) and exact.in_open_simplex(y, p2)
                        and all(exact.dot(a, y) < b for _, a, b in hs))
        if _generic(x, avoid):
            return x
        for d in dirs:
            eps = exact.q(1) / 8
            for _ in range(40):
                y = exact.add(x, exact.scale(eps, d))
                if ok(y) and _generic(y, avoid):
                    return y
                eps /= 2
    raise SweepError("no common interior apex projection found")


def perturbed_picker(attempt: int):
    """Barycenter on the base (height 0); deterministic interior weights above it."""

    def pick(simplex: Simplex, pts: Sequence[Point]) -> Point:
        if attempt == 0 or all(p[-1] == 0 for p in pts):
            return exact.centroid(pts)
        order = sorted(range(len(pts)), key=lambda i: pts[i])
        w = [exact.ZERO] * len(pts)
        for rank_, i in enumerate(order):
            w[i] = exact.ONE + exact.q(attempt * (rank_ + 1) ** 2) / (7 * (attempt + 2))
        tot = sum(w, exact.ZERO)
        return exact.combination([x / tot for x in w], pts)

    return pick


def _cone_ids(pool: VertexPool, key: Callable[[Point], Point]):
    def vid(face: Simplex, p: Point) -> int:
        if p[-1] == 0:
            return pool.id_for(key(p[:-1]))
        return pool.id_for(("cone",) + tuple(p))

    return vid


def _has_vertical_faces(g: GeometricComplex) -> bool:
    for s in g.complex.of_dim(g.ambient_dim - 1):
        pts = g.points(s)
        if all(p[-1] == 0 for p in pts):
            continue
        if not exact.affinely_independent([project(p) for p in pts]):
            return True
    return False


@dataclass
class StarConnection:
    s: int
    sequence: FlipSequence
    start: GeometricComplex
    end: GeometricComplex
    apex: Point
    heights: tuple
    logs: tuple
    attempt: int = 0


def _pool_relabel(g: GeometricComplex, pool: VertexPool, key) -> GeometricComplex:
    mapping = {v: pool.id_for(key(p)) for v, p in g.coords.items()}
    if len(set(mapping.values())) != len(mapping):
        raise SweepError("two vertices share a position")
    return g.relabel(mapping)


def star_connection(g1: GeometricComplex, g2: GeometricComplex, boundary_match=None, s_max: int = 3,
                    s_min: int = 0, pool: Optional[VertexPool] = None,
                    key: Callable[[Point], Point] = lambda p: p, apex: Optional[Point] = None,
                    check: str = "local", attempts: int = 4, method: str = "auto") -> StarConnection:
    """Connect beta^s g1 to beta^s g2 through the common cone boundary.

    ``pool`` and ``key`` make the vertex ids agree with an enclosing
    computation: new vertices get ``pool.id_for(key(point))``.
    """
    if g1.periods is not None or g2.periods is not None:
        raise SweepError("connect developed charts, not periodic complexes")
    if pool is None:
        pool = VertexPool()
        pool.register(g1)
        g2 = _pool_relabel(g2, pool, key)
    else:
        g1 = _pool_relabel(g1, pool, key)
        g2 = _pool_relabel(g2, pool, key)
    b1, b2 = _boundary_facets(g1), _boundary_facets(g2)
    if b1 != b2 or any(g1.coords[v] != g2.coords[v] for f in b1 for v in f):
        raise SweepError("the two triangulations differ on the boundary")
    if boundary_match is not None:
        want = {as_simplex(f) for f in boundary_match}
        if not want <= {x for f in b1 for x in faces(f)}:
            raise SweepError("boundary_match is not part of the boundary")
    if apex is None:
        apex = apex_projection(g1, g2)
    else:
        apex = exact.point(apex)
        if not is_strict_kernel_point(g1, apex):
            raise SweepError("apex projection is outside the kernel")
    akey = ("cone",) + tuple(apex) + (exact.ONE,)
    aid = pool.id_for(akey)
    c1, c2 = cone(g1, apex, 1, aid), cone(g2, apex, 1, aid)
    vid = _cone_ids(pool, key)
    cur1, cur2 = c1.complex, c2.complex
    for s in range(s_max + 1):
        if s >= s_min:
            for attempt in range(attempts if s > 0 else 1):
                if attempt == 0:
                    sub1, sub2 = cur1, cur2
                else:
                    sub1 = _resubdivide(c1.complex, s, attempt, vid)
                    sub2 = _resubdivide(c2.complex, s, attempt, vid)
                if _has_vertical_faces(sub1) or _has_vertical_faces(sub2):
                    log.debug("vertical faces at s=%d, attempt %d", s, attempt)
                    continue
                h1 = find_heights(sub1, method=method)
                h2 = find_heights(sub2, method=method) if h1 is not None else None
                if h1 is None or h2 is None:
                    break
                base1 = _derived_base(g1, s, vid)
                base2 = _derived_base(g2, s, vid)
                r1 = sweep_flips(Cobordism(sub1, aid, fingerprint(base1), base1), h1, check)
                r2 = sweep_flips(Cobordism(sub2, aid, fingerprint(base2), base2), h2, check)
                if r1.start.complex.maximal != r2.start.complex.maximal or r1.start.coords != r2.start.coords:
                    raise SweepError("the two cones have different upper boundaries")
                seq = concatenate(invert_sequence(r1.sequence, dict(r1.end.coords)), r2.sequence)
                seq.fixed_subcomplex = frozenset(base1.complex.boundary_complex().maximal)
                return StarConnection(s, seq, r1.end, r2.end, apex, (h1, h2), (r1.log, r2.log), attempt)
        if s < s_max:
            cur1 = derived_subdivision(cur1, vertex_id=vid)
            cur2 = derived_subdivision(cur2, vertex_id=vid)
    raise RegularizeExhausted(s_max)


def _resubdivide(g: GeometricComplex, s: int, attempt: int, vid) -> GeometricComplex:
    for _ in range(s):
        g = derived_subdivision(g, picker=perturbed_picker(attempt), vertex_id=vid)
    return g


def _derived_base(g: GeometricComplex, s: int, vid) -> GeometricComplex:
    lift = lambda face, p: vid(face, p + (exact.ZERO,))
    for _ in range(s):
        g = derived_subdivision(g, vertex_id=lift)
    return g


def connect_star_convex(g1: GeometricComplex, g2: GeometricComplex, boundary_match=None, s_max: int = 3,
                        **kw) -> tuple[int, FlipSequence]:
    r = star_connection(g1, g2, boundary_match, s_max, **kw)
    return r.s, r.sequence
