"""Abstract and geometric simplicial complexes.

A simplex is a strictly increasing tuple of integer vertex ids.  Complexes are
stored by their inclusion-maximal simplexes and treated as immutable values.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional, Sequence

from . import exact
from .exact import Point

Simplex = tuple

MODELS = ("euclidean", "klein-ball", "sphere-gnomonic")


class ComplexError(ValueError):
    pass


def as_simplex(vertices: Iterable[int]) -> Simplex:
    vs = [int(v) for v in vertices]
    s = tuple(sorted(vs))
    if len(set(s)) != len(s):
        raise ComplexError("duplicate vertex in simplex %r" % (vs,))
    return s


def faces(s: Simplex, include_self: bool = True) -> Iterable[Simplex]:
    n = len(s)
    top = n if include_self else n - 1
    for k in range(1, top + 1):
        yield from itertools.combinations(s, k)


def boundary(s: Simplex) -> list[Simplex]:
    """Codimension-one faces of ``s`` (empty for a vertex)."""
    if len(s) <= 1:
        return []
    return [s[:i] + s[i + 1:] for i in range(len(s))]


def union(a: Simplex, b: Simplex) -> Simplex:
    return tuple(sorted(set(a) | set(b)))


def minus(a: Simplex, b: Iterable[int]) -> Simplex:
    b = set(b)
    return tuple(v for v in a if v not in b)


class SimplicialComplex:
    """Finite abstract simplicial complex, closed under faces."""

    def __init__(self, maximal: Iterable[Iterable[int]] = ()):
        cands = {as_simplex(s) for s in maximal}
        cands.discard(())
        by_vertex: dict[int, list[Simplex]] = {}
        for s in cands:
            for v in s:
                by_vertex.setdefault(v, []).append(s)
        tops = set()
        for s in cands:
            others = by_vertex[s[0]]
            if not any(len(t) > len(s) and set(s) <= set(t) for t in others):
                tops.add(s)
        self.maximal = frozenset(tops)

    @classmethod
    def _trusted(cls, tops: Iterable[Simplex]) -> "SimplicialComplex":
        obj = cls.__new__(cls)
        obj.maximal = frozenset(tops)
        return obj

    def __repr__(self) -> str:
        return "SimplicialComplex(%d maximal, dim %d)" % (len(self.maximal), self.dim)

    def __eq__(self, other) -> bool:
        return isinstance(other, SimplicialComplex) and self.maximal == other.maximal

    def __hash__(self) -> int:
        return hash(self.maximal)

    @cached_property
    def simplexes(self) -> frozenset:
        out = set()
        for s in self.maximal:
            out.update(faces(s))
        return frozenset(out)

    def __len__(self) -> int:
        return len(self.simplexes)

    def __contains__(self, s) -> bool:
        s = tuple(sorted(s))
        if not s:
            return True
        return any(set(s) <= set(t) for t in self.vertex_index.get(s[0], ()))

    def __iter__(self):
        return iter(self.simplexes)

    @cached_property
    def vertex_index(self) -> dict:
        idx: dict[int, set] = {}
        for s in self.maximal:
            for v in s:
                idx.setdefault(v, set()).add(s)
        return idx

    @property
    def vertices(self) -> list[int]:
        return sorted(self.vertex_index)

    @cached_property
    def dim(self) -> int:
        return max((len(s) - 1 for s in self.maximal), default=-1)

    @property
    def is_pure(self) -> bool:
        return all(len(s) - 1 == self.dim for s in self.maximal)

    def containing(self, a: Simplex) -> list[Simplex]:
        """Maximal simplexes that contain ``a``."""
        a = tuple(sorted(a))
        if not a:
            return sorted(self.maximal)
        sa = set(a)
        return sorted(t for t in self.vertex_index.get(a[0], ()) if sa <= set(t))

    def of_dim(self, k: int) -> list[Simplex]:
        return sorted(s for s in self.simplexes if len(s) == k + 1)

    def facet_cofaces(self) -> dict:
        """Map each codimension-one face of the top simplexes to its cofaces."""
        out: dict[Simplex, list] = {}
        for s in self.maximal:
            if len(s) - 1 != self.dim:
                continue
            for f in boundary(s):
                out.setdefault(f, []).append(s)
        return out

    def boundary_complex(self) -> "SimplicialComplex":
        """Faces of the top simplexes lying in exactly one top simplex."""
        return SimplicialComplex._trusted(
            f for f, cof in self.facet_cofaces().items() if len(cof) == 1)

    def f_vector(self) -> list[int]:
        counts = [0] * (self.dim + 1)
        for s in self.simplexes:
            counts[len(s) - 1] += 1
        return counts

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.f_vector()))

    def restrict(self, tops: Iterable[Simplex]) -> "SimplicialComplex":
        return SimplicialComplex(tops)

    def swapped(self, remove: Iterable[Simplex], add: Iterable[Simplex]) -> "SimplicialComplex":
        """Replace some maximal simplexes, updating the vertex index incrementally."""
        remove, add = set(remove), set(add)
        out = SimplicialComplex._trusted((self.maximal - remove) | add)
        idx = dict(self.vertex_index)
        touched = {v for t in remove | add for v in t}
        for v in touched:
            cur = set(idx.get(v, ()))
            cur.difference_update(remove)
            cur.update(t for t in add if v in t)
            if cur:
                idx[v] = cur
            else:
                idx.pop(v, None)
        out.__dict__["vertex_index"] = idx
        return out

    def relabel(self, mapping: Mapping[int, int]) -> "SimplicialComplex":
        return SimplicialComplex._trusted(
            tuple(sorted(mapping[v] for v in s)) for s in self.maximal)


def build_complex(maximal: Iterable[Iterable[int]]) -> SimplicialComplex:
    return SimplicialComplex(maximal)


def _require(a: Simplex, k: SimplicialComplex) -> Simplex:
    a = as_simplex(a)
    if a not in k:
        raise ComplexError("simplex %r is not in the complex" % (a,))
    return a


def link(a: Iterable[int], k: SimplicialComplex) -> SimplicialComplex:
    a = _require(a, k)
    return SimplicialComplex(minus(t, a) for t in k.containing(a))


def star(a: Iterable[int], k: SimplicialComplex) -> SimplicialComplex:
    a = _require(a, k)
    return SimplicialComplex(k.containing(a))


def join(a: Simplex, k: SimplicialComplex) -> SimplicialComplex:
    """Join of a simplex with a complex (the simplex itself if ``k`` is empty)."""
    if not k.maximal:
        return SimplicialComplex([a])
    return SimplicialComplex(union(a, t) for t in k.maximal)


def simplex_boundary_complex(b: Simplex) -> SimplicialComplex:
    return SimplicialComplex(boundary(b))


# ---------------------------------------------------------------------------
# geometric complexes


def _floor_div(x, p) -> int:
    t = exact.q(x) / exact.q(p)
    return t.numerator // t.denominator


class GeometricComplex:
    """A simplicial complex with exact rational vertex coordinates in one chart.

    ``model`` tags the chart: ``euclidean``, ``klein-ball`` (hyperbolic space
    in the Klein model) or ``sphere-gnomonic``.  In every model a geodesic
    simplex is the straight simplex on its chart coordinates.
    """

    periods: Optional[tuple] = None

    def __init__(self, complex: SimplicialComplex, coords: Mapping[int, Point],
                 model: str = "euclidean", ambient_dim: Optional[int] = None):
        if model not in MODELS:
            raise ComplexError("unknown model %r" % (model,))
        self.complex = complex
        self.coords = {int(v): exact.point(p) for v, p in coords.items()}
        missing = [v for v in complex.vertices if v not in self.coords]
        if missing:
            raise ComplexError("vertices without coordinates: %r" % (missing,))
        if ambient_dim is None:
            ambient_dim = len(next(iter(self.coords.values()))) if self.coords else 0
        self.ambient_dim = ambient_dim
        self.model = model
        for v, p in self.coords.items():
            if len(p) != ambient_dim:
                raise ComplexError("vertex %d has %d coordinates, expected %d" % (v, len(p), ambient_dim))

    @classmethod
    def _raw(cls, complex, coords, model, ambient_dim):
        obj = cls.__new__(cls)
        obj.complex, obj.coords, obj.model, obj.ambient_dim = complex, coords, model, ambient_dim
        return obj

    @classmethod
    def from_simplexes(cls, maximal, coords, model="euclidean", ambient_dim=None):
        return cls(SimplicialComplex(maximal), coords, model, ambient_dim)

    def __repr__(self) -> str:
        return "%s(%d tops, dim %d, %s)" % (type(self).__name__, len(self.complex.maximal),
                                            self.complex.dim, self.model)

    @property
    def dim(self) -> int:
        return self.complex.dim

    @property
    def maximal(self) -> frozenset:
        return self.complex.maximal

    @property
    def vertices(self) -> list[int]:
        return self.complex.vertices

    def canonical(self, p: Point) -> Point:
        return p

    def points(self, s: Simplex) -> tuple:
        return tuple(self.coords[v] for v in s)

    def top_frames(self):
        """Yield ``(top simplex, chart points)`` pairs."""
        for s in sorted(self.complex.maximal):
            yield s, self.points(s)

    def develop(self, tops: Iterable[Simplex], anchor: Optional[int] = None) -> dict:
        """One chart for a family of top simplexes sharing ``anchor``."""
        out = {}
        for s in tops:
            for v in s:
                out[v] = self.coords[v]
        return out

    def replace(self, remove: Iterable[Simplex], add: Sequence[Simplex], chart: Mapping[int, Point]):
        """New complex with ``remove`` swapped for ``add`` (points from ``chart``)."""
        cx = self.complex.swapped(remove, add)
        coords = _updated_coords(self.coords, cx, remove, add, lambda v: exact.point(chart[v]))
        return GeometricComplex._raw(cx, coords, self.model, self.ambient_dim)

    def restrict(self, tops: Iterable[Simplex]) -> "GeometricComplex":
        cx = SimplicialComplex(tops)
        return GeometricComplex(cx, {v: self.coords[v] for v in cx.vertices}, self.model, self.ambient_dim)

    def relabel(self, mapping: Mapping[int, int]) -> "GeometricComplex":
        return GeometricComplex(self.complex.relabel(mapping),
                                {mapping[v]: p for v, p in self.coords.items()},
                                self.model, self.ambient_dim)

    def with_complex(self, complex: SimplicialComplex, coords: Mapping[int, Point]):
        return GeometricComplex(complex, coords, self.model, self.ambient_dim)

    def volume(self) -> exact.Q:
        """Total volume of the top simplexes (full-dimensional only)."""
        total = sum((abs(exact.signed_volume(p)) for _, p in self.top_frames()), exact.ZERO)
        return total / math.factorial(self.ambient_dim)

    def vertex_at(self) -> dict:
        return {p: v for v, p in self.coords.items()}

    def next_vertex_id(self) -> int:
        return max(self.coords, default=-1) + 1


def _updated_coords(coords, cx, remove, add, place) -> dict:
    out = dict(coords)
    for t in add:
        for v in t:
            if v not in out:
                out[v] = place(v)
    live = cx.vertex_index
    for t in remove:
        for v in t:
            if v not in live:
                out.pop(v, None)
    return out


class ManifoldComplex(GeometricComplex):
    """Flat manifold complex glued by lattice translations (a flat torus).

    ``coords`` are canonical positions in the fundamental box
    ``[0, periods)``; every top simplex carries its own lift to R^n.  Lifts
    are normalised so that the vertex with the lexicographically smallest
    canonical position sits at that canonical position.  Facet gluings are
    the translations between neighbouring lifts.
    """

    def __init__(self, complex: SimplicialComplex, coords: Mapping[int, Point],
                 lifts: Mapping[Simplex, Sequence[Point]], periods: Sequence,
                 ambient_dim: Optional[int] = None):
        self.periods = tuple(exact.q(p) for p in periods)
        super().__init__(complex, {v: self._reduce(exact.point(p)) for v, p in coords.items()},
                         "euclidean", ambient_dim or len(self.periods))
        lf = {}
        for s in complex.maximal:
            if s not in lifts:
                raise ComplexError("top simplex %r has no lift" % (s,))
            lf[s] = self._normalize(s, tuple(exact.point(p) for p in lifts[s]))
        self.lifts = lf

    def _reduce(self, p: Point) -> Point:
        return tuple(x - _floor_div(x, per) * per for x, per in zip(p, self.periods))

    def canonical(self, p: Point) -> Point:
        return self._reduce(p)

    def _normalize(self, s: Simplex, pts: tuple) -> tuple:
        for v, p in zip(s, pts):
            if self._reduce(p) != self.coords[v]:
                raise ComplexError("lift of vertex %d in %r is not congruent to its position" % (v, s))
        i = min(range(len(s)), key=lambda k: self.coords[s[k]])
        shift = exact.sub(self.coords[s[i]], pts[i])
        return tuple(exact.add(p, shift) for p in pts)

    def points(self, s: Simplex) -> tuple:
        s = tuple(sorted(s))
        tops = self.complex.containing(s)
        if not tops:
            raise ComplexError("simplex %r not in complex" % (s,))
        t = tops[0]
        lift = dict(zip(t, self.lifts[t]))
        return tuple(lift[v] for v in s)

    def top_frames(self):
        for s in sorted(self.complex.maximal):
            yield s, self.lifts[s]

    def develop(self, tops: Iterable[Simplex], anchor: Optional[int] = None) -> dict:
        tops = list(tops)
        if anchor is None:
            common = set(tops[0]).intersection(*map(set, tops[1:])) if tops else set()
            if not common:
                raise ComplexError("cannot develop simplexes without a common vertex")
            anchor = min(common)
        ref = self.coords[anchor]
        out: dict[int, Point] = {}
        for s in tops:
            lift = dict(zip(s, self.lifts[s]))
            shift = exact.sub(ref, lift[anchor])
            for v, p in lift.items():
                p = exact.add(p, shift)
                if out.setdefault(v, p) != p:
                    raise ComplexError("development around vertex %d is not embedded (vertex %d)" % (anchor, v))
        return out

    def replace(self, remove, add, chart):
        remove = set(remove)
        cx = self.complex.swapped(remove, add)
        coords = _updated_coords(self.coords, cx, remove, add, lambda v: self._reduce(exact.point(chart[v])))
        lifts = dict(self.lifts)
        for t in remove:
            lifts.pop(t, None)
        out = ManifoldComplex._raw(cx, coords, self.model, self.ambient_dim)
        out.periods = self.periods
        for t in add:
            lifts[t] = out._normalize(t, tuple(exact.point(chart[v]) for v in t))
        out.lifts = lifts
        return out

    def restrict(self, tops):
        cx = SimplicialComplex(tops)
        return ManifoldComplex(cx, {v: self.coords[v] for v in cx.vertices},
                               {s: self.lifts[s] for s in cx.maximal}, self.periods, self.ambient_dim)

    def relabel(self, mapping):
        lifts = {}
        for s, pts in self.lifts.items():
            pairs = sorted((mapping[v], p) for v, p in zip(s, pts))
            lifts[tuple(v for v, _ in pairs)] = tuple(p for _, p in pairs)
        return ManifoldComplex(self.complex.relabel(mapping),
                               {mapping[v]: p for v, p in self.coords.items()},
                               lifts, self.periods, self.ambient_dim)

    def with_complex(self, complex, coords, lifts=None):
        return ManifoldComplex(complex, coords, lifts or {}, self.periods, self.ambient_dim)

    def gluings(self) -> dict:
        """Translation carrying the lift of one top simplex onto its neighbour, per interior facet."""
        out = {}
        for f, cof in self.complex.facet_cofaces().items():
            if len(cof) != 2:
                continue
            s, t = sorted(cof)
            ls, lt = dict(zip(s, self.lifts[s])), dict(zip(t, self.lifts[t]))
            out[(s, t)] = exact.sub(lt[f[0]], ls[f[0]])
        return out


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str  # degenerate | overlap | non-face | domain | embedding | duplicate-vertex
    simplexes: tuple
    detail: str = ""


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def __iter__(self):
        return iter(self.violations)

    def kinds(self) -> list[str]:
        return [v.kind for v in self.violations]


class _Cell:
    """A straight simplex in a chart, with lazily computed facet hyperplanes."""

    __slots__ = ("key", "pts", "box", "_planes", "full")

    def __init__(self, key, pts, ambient):
        self.key = key
        self.pts = tuple(pts)
        self.box = exact.bbox(self.pts)
        self._planes = None
        self.full = len(self.pts) == ambient + 1

    def planes(self):
        if self._planes is None:
            planes = []
            for i, p in enumerate(self.pts):
                rest = self.pts[:i] + self.pts[i + 1:]
                a, b = exact.hyperplane(rest)
                if exact.dot(a, p) - b > 0:
                    a, b = [-x for x in a], -b
                planes.append((a, b))  # a.x <= b on the simplex
            self._planes = planes
        return self._planes


def _separated(c1: _Cell, c2: _Cell, common: set) -> bool:
    """True when a facet plane of ``c1`` proves ``c1 ∩ c2 ⊆ conv(common)``."""
    for a, b in c1.planes():
        ok = True
        on = []
        for p in c2.pts:
            s = exact.dot(a, p) - b
            if s < 0:
                ok = False
                break
            if s == 0:
                on.append(p)
        if ok and all(p in common for p in on):
            return True
    return False


def _lp_pair(p1, p2, objective_on) -> exact.LPResult:
    k1, k2 = len(p1), len(p2)
    dim = len(p1[0])
    a_eq = []
    b_eq = []
    for i in range(dim):
        a_eq.append([p[i] for p in p1] + [-p[i] for p in p2])
        b_eq.append(0)
    a_eq.append([1] * k1 + [0] * k2)
    b_eq.append(1)
    a_eq.append([0] * k1 + [1] * k2)
    b_eq.append(1)
    c = [1 if j in objective_on else 0 for j in range(k1 + k2)]
    return exact.lp_max(c, a_eq=a_eq, b_eq=b_eq)


def _relint_overlap(p1, p2) -> bool:
    k1, k2 = len(p1), len(p2)
    dim = len(p1[0])
    n = k1 + k2 + 1
    a_eq, b_eq = [], []
    for i in range(dim):
        a_eq.append([p[i] for p in p1] + [-p[i] for p in p2] + [0])
        b_eq.append(0)
    a_eq.append([1] * k1 + [0] * k2 + [0])
    b_eq.append(1)
    a_eq.append([0] * k1 + [1] * k2 + [0])
    b_eq.append(1)
    a_ub, b_ub = [], []
    for j in range(k1 + k2):
        row = [0] * n
        row[j] = -1
        row[-1] = 1
        a_ub.append(row)
        b_ub.append(0)
    c = [0] * (n - 1) + [1]
    res = exact.lp_max(c, a_ub, b_ub, a_eq, b_eq)
    return res.status != "infeasible" and (res.status == "unbounded" or res.value > 0)


def pair_violation(c1: _Cell, c2: _Cell) -> Optional[str]:
    """Classify how two nondegenerate straight simplexes fail to meet in a common face."""
    if not exact.boxes_overlap(c1.box, c2.box):
        return None
    common = set(c1.pts) & set(c2.pts)
    if c1.full and _separated(c1, c2, common):
        return None
    if c2.full and _separated(c2, c1, common):
        return None
    outside = {j for j, p in enumerate(c1.pts) if p not in common}
    res = _lp_pair(c1.pts, c2.pts, outside)
    if res.status == "infeasible" or res.value == 0:
        return None
    return "overlap" if _relint_overlap(c1.pts, c2.pts) else "non-face"


def _check_pairs(cells: list, violations: list, only=None) -> None:
    order = sorted(range(len(cells)), key=lambda i: cells[i].box[0][0])
    active: list[int] = []
    for i in order:
        lo = cells[i].box[0][0]
        active = [j for j in active if cells[j].box[1][0] >= lo]
        for j in active:
            if only is not None and not (only(cells[i]) or only(cells[j])):
                continue
            if cells[i].key == cells[j].key:
                continue
            kind = pair_violation(cells[i], cells[j])
            if kind:
                a, b = sorted([cells[i].key, cells[j].key])
                violations.append(Violation(kind, (a, b)))
        active.append(i)


def _domain_ok(model: str, p: Point) -> bool:
    if model == "klein-ball":
        return exact.dot(p, p) < 1
    return True


def validate_geometric(g: GeometricComplex) -> ValidationReport:
    """Report every degenerate simplex, overlap, non-face intersection and domain violation."""
    out: list[Violation] = []
    seen: dict = {}
    for v in g.vertices:
        p = g.coords[v]
        if p in seen:
            out.append(Violation("duplicate-vertex", ((seen[p],), (v,))))
        seen[p] = v
        if not _domain_ok(g.model, p):
            out.append(Violation("domain", ((v,),), "vertex outside the %s chart domain" % g.model))
    cells = []
    for s, pts in g.top_frames():
        if not exact.affinely_independent(pts):
            out.append(Violation("degenerate", (s,)))
            continue
        cells.append((s, pts))
    if isinstance(g, ManifoldComplex):
        _validate_periodic(g, cells, out)
    else:
        _check_pairs([_Cell(s, p, g.ambient_dim) for s, p in cells], out)
    return ValidationReport(out)


def _validate_periodic(g: ManifoldComplex, cells, out) -> None:
    for v in g.vertices:
        try:
            g.develop(g.complex.containing((v,)), v)
        except ComplexError as e:
            out.append(Violation("embedding", ((v,),), str(e)))
    for f, cof in g.complex.facet_cofaces().items():
        if len(cof) > 2:
            out.append(Violation("non-face", tuple(cof), "facet %r in more than two top simplexes" % (f,)))
    n = g.ambient_dim
    shifts = list(itertools.product((-1, 0, 1), repeat=n))
    unrolled = []
    for s, pts in cells:
        for k in shifts:
            t = tuple(ki * per for ki, per in zip(k, g.periods))
            unrolled.append(_Cell((s, k), [exact.add(p, t) for p in pts], n))
    base = lambda c: all(x == 0 for x in c.key[1])
    found: list[Violation] = []
    _check_pairs(unrolled, found, only=base)
    reported = set()
    for viol in found:
        pair = tuple(sorted(x[0] for x in viol.simplexes))
        if pair not in reported:
            reported.add(pair)
            out.append(Violation(viol.kind, pair))


# ---------------------------------------------------------------------------
# identity and fingerprints


def _canonical_form(g: GeometricComplex) -> dict:
    order = sorted(g.vertices, key=lambda v: g.coords[v])
    index = {v: i for i, v in enumerate(order)}
    tops = []
    for s, pts in g.top_frames():
        if isinstance(g, ManifoldComplex):
            pairs = sorted((index[v], exact.fmt_point(p)) for v, p in zip(s, pts))
            tops.append(pairs)
        else:
            tops.append(sorted(index[v] for v in s))
    tops.sort()
    form = {
        "model": g.model,
        "dim": g.ambient_dim,
        "vertices": [exact.fmt_point(g.coords[v]) for v in order],
        "tops": tops,
    }
    if g.periods is not None:
        form["periods"] = [exact.fmt(p) for p in g.periods]
    return form


def fingerprint(g: GeometricComplex) -> str:
    """Relabelling-invariant hash of the geometric complex."""
    data = json.dumps(_canonical_form(g), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(data.encode()).hexdigest()


def vertex_matching(g1: GeometricComplex, g2: GeometricComplex) -> Optional[dict]:
    """Vertex bijection g1 -> g2 matching coordinates exactly, if one exists."""
    if len(g1.coords) != len(g2.coords):
        return None
    at = {p: v for v, p in g2.coords.items()}
    mapping = {}
    for v, p in g1.coords.items():
        if p not in at:
            return None
        mapping[v] = at[p]
    if len(set(mapping.values())) != len(mapping):
        return None
    return mapping


def complexes_equal(g1: GeometricComplex, g2: GeometricComplex) -> bool:
    """True iff a coordinate-preserving vertex bijection induces a simplex bijection."""
    if g1.model != g2.model or g1.ambient_dim != g2.ambient_dim or g1.periods != g2.periods:
        return False
    m = vertex_matching(g1, g2)
    if m is None:
        return False
    r = g1.relabel(m)
    if r.complex.maximal != g2.complex.maximal:
        return False
    if isinstance(r, ManifoldComplex):
        return all(r.lifts[s] == g2.lifts[s] for s in r.complex.maximal)
    return True


# ---------------------------------------------------------------------------
# construction helpers


class VertexPool:
    """Position-keyed vertex ids: one id per canonical chart position.

    Complexes built through the same pool agree on the id of every vertex
    they share, which is what lets independently built pieces be glued and
    sequences computed on one piece be replayed on another.
    """

    def __init__(self, start: int = 0):
        self._ids: dict[Point, int] = {}
        self._next = start

    def register(self, g: GeometricComplex) -> None:
        self.register_coords(g.coords)

    def register_coords(self, coords: Mapping[int, Point]) -> None:
        for v, p in coords.items():
            known = self._ids.get(p)
            if known is not None and known != v:
                raise ComplexError("position %r already registered as vertex %d" % (p, known))
            self._ids[p] = v
            self._next = max(self._next, v + 1)

    def id_for(self, p: Point) -> int:
        v = self._ids.get(p)
        if v is None:
            v = self._next
            self._next += 1
            self._ids[p] = v
        return v

    def lookup(self, p: Point) -> Optional[int]:
        return self._ids.get(p)

    def fresh(self) -> int:
        v = self._next
        self._next += 1
        return v


def assemble(template: GeometricComplex, tops: Mapping[Simplex, Sequence[Point]]) -> GeometricComplex:
    """Build a complex of the same kind as ``template`` from top simplexes and chart points."""
    coords: dict[int, Point] = {}
    for s, pts in tops.items():
        for v, p in zip(s, pts):
            c = template.canonical(p)
            if coords.setdefault(v, c) != c:
                raise ComplexError("vertex %d placed at two positions" % v)
    cx = SimplicialComplex._trusted(tops.keys())
    if isinstance(template, ManifoldComplex):
        return ManifoldComplex(cx, coords, tops, template.periods, template.ambient_dim)
    return GeometricComplex(cx, coords, template.model, template.ambient_dim)


def lift_into(g: GeometricComplex, a: Point, simplex_pts: Sequence[Point], open_: bool = True) -> Optional[Point]:
    """Translate ``a`` by a period vector so it lies in the given chart simplex."""
    test = exact.in_open_simplex if open_ else exact.in_closed_simplex
    if g.periods is None:
        return a if test(a, simplex_pts) else None
    lo, hi = exact.bbox(simplex_pts)
    ranges = []
    for x, l, h, per in zip(a, lo, hi, g.periods):
        ranges.append(range(_floor_div(l - x, per), _floor_div(h - x, per) + 1))
    for k in itertools.product(*ranges):
        p = tuple(x + ki * per for x, ki, per in zip(a, k, g.periods))
        if test(p, simplex_pts):
            return p
    return None
