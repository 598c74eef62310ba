"""Stellar and bistellar moves, derived and interpolating subdivisions, flip sequences."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import exact
from .complex import (ComplexError, GeometricComplex, Simplex, SimplicialComplex,
                      VertexPool, _Cell, as_simplex, assemble, boundary, faces, fingerprint,
                      lift_into, minus, pair_violation, union, vertex_matching)
from .exact import Point

STELLAR_SUBDIVIDE = "stellar_subdivide"
STELLAR_WELD = "stellar_weld"
BISTELLAR = "bistellar"


class MoveError(ComplexError):
    """A move whose combinatorial or geometric precondition fails."""

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


@dataclass(frozen=True)
class Move:
    """One replayable event.

    ``vertex``/``point`` name the vertex created (subdivision, or a bistellar
    move with a 0-dimensional B) or destroyed (weld, or a bistellar move with
    a 0-dimensional A); ``point`` is in canonical chart coordinates.
    """

    kind: str
    A: Simplex
    B: Optional[Simplex] = None
    vertex: Optional[int] = None
    point: Optional[Point] = None

    def inverse(self) -> "Move":
        if self.kind == STELLAR_SUBDIVIDE:
            return Move(STELLAR_WELD, self.A, None, self.vertex, self.point)
        if self.kind == STELLAR_WELD:
            return Move(STELLAR_SUBDIVIDE, self.A, None, self.vertex, self.point)
        return Move(BISTELLAR, self.B, self.A, self.vertex, self.point)

    def named(self) -> list[Simplex]:
        out = [self.A]
        if self.B is not None:
            out.append(self.B)
        return out

    @property
    def label(self) -> str:
        if self.kind != BISTELLAR:
            return self.kind
        return "%d-%d" % (len(self.B), len(self.A))


@dataclass
class FlipSequence:
    moves: list
    start_fingerprint: str
    end_fingerprint: str
    fixed_subcomplex: Optional[frozenset] = None
    start_vertices: Optional[dict] = None  # id -> canonical position, for relabelling on replay

    def __len__(self) -> int:
        return len(self.moves)

    def counts(self) -> dict:
        out: dict[str, int] = {}
        for m in self.moves:
            out[m.label] = out.get(m.label, 0) + 1
        return out


class SequenceError(ComplexError):
    def __init__(self, step: int, message: str, cause: Optional[Exception] = None):
        super().__init__("step %d: %s" % (step, message))
        self.step = step
        self.cause = cause


# ---------------------------------------------------------------------------
# local geometry checks


def _require_full(g: GeometricComplex) -> None:
    if g.dim != g.ambient_dim:
        raise MoveError("dimension", "moves need a full-dimensional complex (dim %d in R^%d)"
                        % (g.dim, g.ambient_dim))


def _volume(cells: Iterable[Sequence[Point]]):
    return sum((abs(exact.signed_volume(p)) for p in cells), exact.ZERO)


def check_retriangulation(old: Sequence[Sequence[Point]], new: Sequence[Sequence[Point]], ambient: int) -> Optional[str]:
    """None when ``new`` triangulates exactly the point set ``|old|``.

    Both families share their boundary combinatorially by construction, so
    nondegeneracy, pairwise proper intersection and equal volume suffice.
    """
    for pts in new:
        if not exact.affinely_independent(pts):
            return "new simplex is degenerate"
    cells = [_Cell(i, pts, ambient) for i, pts in enumerate(new)]
    for c1, c2 in itertools.combinations(cells, 2):
        kind = pair_violation(c1, c2)
        if kind:
            return "new simplexes %s" % kind
    if _volume(old) != _volume(new):
        return "point sets differ (volume)"
    return None


def _vertex_point(g: GeometricComplex, a: Point, target: Sequence[Point]) -> Point:
    """Chart position of a canonical point that must sit in the open simplex ``target``."""
    p = lift_into(g, exact.point(a), target, open_=False)
    if p is None:
        p = exact.point(a)
    bary = exact.barycentric(p, target)
    if bary is None or not all(x > 0 for x in bary):
        raise MoveError("not-interior", "point %r is not interior to the simplex" % (a,))
    return p


# ---------------------------------------------------------------------------
# moves


def stellar_subdivide(g: GeometricComplex, a_simplex: Iterable[int], a: Point,
                      vertex: Optional[int] = None) -> GeometricComplex:
    """Replace st(A) by a * dA * lk(A) for a point ``a`` interior to A."""
    return _subdivide(g, a_simplex, a, vertex)[0]


def _subdivide(g, a_simplex, a, vertex):
    _require_full(g)
    A = as_simplex(a_simplex)
    if len(A) < 2:
        raise MoveError("not-interior", "cannot subdivide a vertex")
    old = g.complex.containing(A)
    if not old:
        raise MoveError("missing", "simplex %r is not in the complex" % (A,))
    chart = g.develop(old, A[0])
    pa = _vertex_point(g, a, [chart[v] for v in A])
    v = g.next_vertex_id() if vertex is None else vertex
    if v in g.coords:
        raise MoveError("present", "vertex id %d already in use" % v)
    chart = dict(chart)
    chart[v] = pa
    new = [union(minus(s, (w,)), (v,)) for s in old for w in A]
    err = check_retriangulation([[chart[x] for x in s] for s in old],
                                [[chart[x] for x in s] for s in new], g.ambient_dim)
    if err:
        raise MoveError("geometric", err)
    return g.replace(old, new, chart), Move(STELLAR_SUBDIVIDE, A, None, v, g.canonical(pa))


def stellar_weld(g: GeometricComplex, a_simplex: Iterable[int], a: int) -> GeometricComplex:
    """Inverse of :func:`stellar_subdivide`: remove vertex ``a`` restoring simplex A."""
    return _weld(g, a_simplex, a)[0]


def _weld(g, a_simplex, a):
    _require_full(g)
    A = as_simplex(a_simplex)
    if len(A) < 2 or a in A:
        raise MoveError("weld-pattern", "bad weld simplex %r" % (A,))
    old = g.complex.containing((a,))
    if not old:
        raise MoveError("missing", "vertex %d is not in the complex" % a)
    if A in g.complex:
        raise MoveError("present", "simplex %r already present" % (A,))
    rests = set()
    for s in old:
        tau = minus(s, (a,))
        missing = set(A) - set(tau)
        if len(missing) != 1:
            raise MoveError("weld-pattern", "star of %d is not a * dA * lk" % a)
        rests.add(minus(tau, A))
    expected = {union(union(minus(A, (w,)), r), (a,)) for r in rests for w in A}
    if expected != set(old):
        raise MoveError("weld-pattern", "star of %d is not a * dA * lk" % a)
    chart = g.develop(old, a)
    apts = [chart[v] for v in A]
    if not exact.affinely_independent(apts):
        raise MoveError("geometric", "welded simplex %r would be degenerate" % (A,))
    bary = exact.barycentric(chart[a], apts)
    if bary is None or not all(x > 0 for x in bary):
        raise MoveError("geometric", "vertex %d is not interior to %r" % (a, A))
    new = [union(A, r) for r in sorted(rests)]
    err = check_retriangulation([[chart[x] for x in s] for s in old],
                                [[chart[x] for x in s] for s in new], g.ambient_dim)
    if err:
        raise MoveError("geometric", err)
    return g.replace(old, new, chart), Move(STELLAR_WELD, A, None, a, g.canonical(chart[a]))


def bistellar_move(g: GeometricComplex, a_simplex: Iterable[int], b_simplex: Optional[Iterable[int]] = None,
                   a: Optional[Point] = None, vertex: Optional[int] = None) -> GeometricComplex:
    """kappa(A, B): replace A * dB by dA * B when lk(A) = dB.

    With ``b_simplex`` omitted (or a single fresh vertex) the move inserts a
    vertex at ``a`` inside the top simplex A.
    """
    return _bistellar(g, a_simplex, b_simplex, a, vertex)[0]


def _bistellar(g, a_simplex, b_simplex, a, vertex):
    _require_full(g)
    A = as_simplex(a_simplex)
    B = as_simplex(b_simplex) if b_simplex is not None else None
    if A not in g.complex:
        raise MoveError("missing", "simplex %r is not in the complex" % (A,))
    old = g.complex.containing(A)
    n = g.ambient_dim
    inserting = B is None or (len(B) == 1 and B[0] not in g.coords)
    if inserting:
        if a is None:
            raise MoveError("not-interior", "a 0-dimensional B needs a point")
        if old != [A] or len(A) != n + 1:
            raise MoveError("link-mismatch", "lk(%r) is not empty" % (A,))
        v = B[0] if B else (g.next_vertex_id() if vertex is None else vertex)
        chart = dict(g.develop(old, A[0]))
        chart[v] = _vertex_point(g, a, [chart[x] for x in A])
        B = (v,)
    else:
        if len(A) + len(B) != n + 2:
            raise MoveError("link-mismatch", "|A| + |B| must be %d" % (n + 2))
        if set(A) & set(B):
            raise MoveError("link-mismatch", "A and B intersect")
        if B in g.complex:
            raise MoveError("present", "simplex %r already present" % (B,))
        lk = {minus(s, A) for s in old}
        if lk != set(boundary(B)):
            raise MoveError("link-mismatch", "lk(%r) is not the boundary of %r" % (A, B))
        chart = g.develop(old, A[0])
    new = [union(minus(A, (w,)), B) for w in A]
    err = check_retriangulation([[chart[x] for x in s] for s in old],
                                [[chart[x] for x in s] for s in new], n)
    if err:
        raise MoveError("geometric", "move is not geometric: " + err)
    removed = None
    if len(A) == 1:
        removed = A[0]
    created = B[0] if len(B) == 1 else None
    vid = created if created is not None else removed
    pt = g.canonical(chart[vid]) if vid is not None else None
    return g.replace(old, new, chart), Move(BISTELLAR, A, B, vid, pt)


def apply_move(g: GeometricComplex, m: Move) -> GeometricComplex:
    if m.kind == STELLAR_SUBDIVIDE:
        return _subdivide(g, m.A, m.point, m.vertex)[0]
    if m.kind == STELLAR_WELD:
        return _weld(g, m.A, m.vertex)[0]
    if m.kind == BISTELLAR:
        if len(m.B) == 1 and m.B[0] not in g.coords:
            return _bistellar(g, m.A, m.B, m.point, m.B[0])[0]
        return _bistellar(g, m.A, m.B, None, None)[0]
    raise MoveError("kind", "unknown move kind %r" % (m.kind,))


def record(g: GeometricComplex, kind: str, A, B=None, a=None, vertex=None):
    """Perform a move and return ``(new complex, Move)``."""
    if kind == STELLAR_SUBDIVIDE:
        return _subdivide(g, A, a, vertex)
    if kind == STELLAR_WELD:
        return _weld(g, A, vertex)
    return _bistellar(g, A, B, a, vertex)


# ---------------------------------------------------------------------------
# sequences


def make_sequence(start: GeometricComplex, moves: Sequence[Move], end: Optional[GeometricComplex] = None,
                  fixed: Optional[Iterable[Simplex]] = None) -> FlipSequence:
    if end is None:
        end = start
        for m in moves:
            end = apply_move(end, m)
    return FlipSequence(list(moves), fingerprint(start), fingerprint(end),
                        frozenset(map(tuple, fixed)) if fixed is not None else None,
                        dict(start.coords))


def _closure(simplexes: Iterable[Simplex]) -> set:
    out = set()
    for s in simplexes:
        out.update(faces(tuple(s)))
    return out


def apply_sequence(g: GeometricComplex, seq: FlipSequence,
                   on_step: Optional[Callable[[int, GeometricComplex], None]] = None) -> GeometricComplex:
    """Replay ``seq`` from ``g`` with geometric validation of every move."""
    if fingerprint(g) != seq.start_fingerprint:
        raise SequenceError(-1, "start complex does not match the sequence")
    if seq.start_vertices is not None:
        target = {v: exact.point(p) for v, p in seq.start_vertices.items()}
        if target != g.coords:
            ref = GeometricComplex(SimplicialComplex(), target, g.model, g.ambient_dim)
            mapping = vertex_matching(g, ref)
            if mapping is None:
                raise SequenceError(-1, "start vertices do not match the sequence")
            g = g.relabel(mapping)
    fixed = _closure(seq.fixed_subcomplex) if seq.fixed_subcomplex else set()
    for s in fixed:
        if s not in g.complex:
            raise SequenceError(-1, "fixed simplex %r missing from the start complex" % (s,))
    cur = g
    for i, m in enumerate(seq.moves):
        for s in m.named():
            if s in fixed:
                raise SequenceError(i, "move names fixed simplex %r" % (s,))
        try:
            cur = apply_move(cur, m)
        except ComplexError as e:
            raise SequenceError(i, str(e), e) from e
        if fixed:
            star_vs = set(m.A) | set(m.B or ())
            for s in fixed:
                if set(s) & star_vs and s not in cur.complex:
                    raise SequenceError(i, "fixed simplex %r destroyed" % (s,))
        if on_step is not None:
            on_step(i, cur)
    if fingerprint(cur) != seq.end_fingerprint:
        raise SequenceError(len(seq.moves), "end complex does not match the sequence")
    return cur


def invert_sequence(seq: FlipSequence, end_vertices: Optional[dict] = None) -> FlipSequence:
    return FlipSequence([m.inverse() for m in reversed(seq.moves)], seq.end_fingerprint,
                        seq.start_fingerprint, seq.fixed_subcomplex, end_vertices)


def concatenate(first: FlipSequence, second: FlipSequence) -> FlipSequence:
    if first.end_fingerprint != second.start_fingerprint:
        raise SequenceError(len(first.moves), "sequences do not compose")
    fixed = first.fixed_subcomplex
    if fixed is not None and second.fixed_subcomplex is not None:
        fixed = fixed | second.fixed_subcomplex
    return FlipSequence(first.moves + second.moves, first.start_fingerprint,
                        second.end_fingerprint, fixed, first.start_vertices)


# ---------------------------------------------------------------------------
# subdivisions

Picker = Callable[[Simplex, Sequence[Point]], Point]


def barycenter_picker(simplex: Simplex, pts: Sequence[Point]) -> Point:
    return exact.centroid(pts)


def _subcomplex_set(L) -> set:
    if L is None:
        return set()
    if isinstance(L, SimplicialComplex):
        return set(L.simplexes)
    return _closure(L)


class _Ids:
    """Vertex ids for new cone points: pool-backed or sequential by face order."""

    def __init__(self, g: GeometricComplex, pool: Optional[VertexPool], faces_needed, extra_max: int = -1):
        self.g = g
        self.pool = pool
        self.table: dict = {}
        if pool is not None:
            pool.register(g)
        else:
            nxt = max(g.next_vertex_id(), extra_max + 1)
            for f in sorted(faces_needed, key=lambda s: (len(s), s)):
                self.table[f] = nxt
                nxt += 1

    def __call__(self, face: Simplex, p: Point) -> int:
        if self.pool is not None:
            return self.pool.id_for(self.g.canonical(p))
        return self.table[face]


def derived_subdivision(g: GeometricComplex, L=None, picker: Picker = barycenter_picker,
                        pool: Optional[VertexPool] = None,
                        vertex_id: Optional[Callable[[Simplex, Point], int]] = None) -> GeometricComplex:
    """Derived subdivision relative to ``L``.

    Every simplex of dimension >= 1 outside L is stellarly subdivided, in
    decreasing dimension; equivalently each such simplex is coned from its
    picked point over the subdivision of its boundary.  For periodic
    complexes ``picker`` must commute with translations.  ``vertex_id``
    overrides how the new vertices are numbered.
    """
    Lset = _subcomplex_set(L)
    need = [s for s in g.complex.simplexes if len(s) >= 2 and s not in Lset]
    ids = vertex_id or _Ids(g, pool, need)
    tops: dict[Simplex, tuple] = {}
    for sigma, pts in g.top_frames():
        frame = dict(zip(sigma, pts))
        memo: dict = {}

        def rec(tau):
            if tau in memo:
                return memo[tau]
            if len(tau) == 1 or tau in Lset:
                out = [(tau, {v: frame[v] for v in tau})]
            else:
                tpts = [frame[v] for v in tau]
                p = picker(tau, tpts)
                if picker is not barycenter_picker and not exact.in_open_simplex(p, tpts):
                    raise MoveError("not-interior", "picked point %r is not interior to %r" % (p, tau))
                b = ids(tau, p)
                out = []
                for f in boundary(tau):
                    for s, fp in rec(f):
                        d = dict(fp)
                        d[b] = p
                        out.append((union(s, (b,)), d))
            memo[tau] = out
            return out

        for s, d in rec(sigma):
            tops[s] = tuple(d[v] for v in s)
    return assemble(g, tops)


def iterated_derived(g: GeometricComplex, times: int, L=None, pool: Optional[VertexPool] = None) -> GeometricComplex:
    for _ in range(times):
        g = derived_subdivision(g, L, pool=pool)
    return g


def refinement(g: GeometricComplex, alpha: GeometricComplex) -> dict:
    """Assign each top simplex of ``alpha`` to the top simplex of ``g`` containing it.

    Returns ``{sigma: [(alpha simplex, points in sigma's frame), ...]}``;
    raises when ``alpha`` is not a geometric subdivision of ``g``.
    """
    frames = list(g.top_frames())
    boxes = [exact.bbox(p) for _, p in frames]
    out: dict[Simplex, list] = {s: [] for s, _ in frames}
    for t, tpts in alpha.top_frames():
        c = exact.centroid(tpts)
        placed = False
        for (s, spts), box in zip(frames, boxes):
            if g.periods is None and not all(l <= x <= h for x, l, h in zip(c, box[0], box[1])):
                continue
            cc = lift_into(g, g.canonical(c), spts, open_=False) if g.periods is not None else (
                c if exact.in_closed_simplex(c, spts) else None)
            if cc is None:
                continue
            shift = exact.sub(cc, c)
            moved = [exact.add(p, shift) for p in tpts]
            if not all(exact.in_closed_simplex(p, spts) for p in moved):
                raise ComplexError("simplex %r of the subdivision straddles %r" % (t, s))
            out[s].append((t, tuple(moved)))
            placed = True
            break
        if not placed:
            raise ComplexError("simplex %r of the subdivision lies outside the complex" % (t,))
    for (s, spts) in frames:
        if _volume([p for _, p in out[s]]) != abs(exact.signed_volume(spts)):
            raise ComplexError("subdivision does not cover %r" % (s,))
    return out


def carried_faces(sigma: Simplex, spts: Sequence[Point], cells: Sequence) -> dict:
    """Group the faces of the refining cells by the face of sigma that carries them.

    Returns ``{tau: {fine simplex: points}}`` keeping only fine faces whose
    dimension equals that of their carrier.
    """
    out: dict[Simplex, dict] = {}
    for t, tpts in cells:
        frame = dict(zip(t, tpts))
        for f in faces(t):
            fp = [frame[v] for v in f]
            lam = exact.barycentric(exact.centroid(fp), spts)
            carrier = tuple(v for v, l in zip(sigma, lam) if l > 0)
            if len(carrier) == len(f):
                out.setdefault(carrier, {})[f] = tuple(fp)
    return out


def interpolate_frame(sigma: Simplex, spts: Sequence[Point], carried: Mapping, use_alpha: Callable[[Simplex], bool],
                      ids: Callable[[Simplex, Point], int], picker: Picker = barycenter_picker) -> dict:
    """Top simplexes of the interpolated subdivision of one simplex, in its frame.

    Faces with ``use_alpha(tau)`` carry the refinement; the others are coned
    from their picked point over their already subdivided boundary.
    """
    frame = dict(zip(sigma, spts))
    memo: dict = {}

    def rec(tau):
        if tau in memo:
            return memo[tau]
        if use_alpha(tau):
            fine = carried.get(tau)
            if not fine:
                raise ComplexError("refinement has nothing carried by %r" % (tau,))
            out = [(f, dict(zip(f, p))) for f, p in sorted(fine.items())]
        else:
            p = picker(tau, [frame[v] for v in tau])
            b = ids(tau, p)
            out = []
            for f in boundary(tau):
                for s, fp in rec(f):
                    d = dict(fp)
                    d[b] = p
                    out.append((union(s, (b,)), d))
        memo[tau] = out
        return out

    return {s: tuple(d[v] for v in s) for s, d in rec(sigma)}


def interpolating_subdivision(g: GeometricComplex, alpha: GeometricComplex, L, r: int,
                              pool: Optional[VertexPool] = None) -> GeometricComplex:
    """Subdivision carrying ``alpha`` on L and on simplexes of dimension <= r, coned above."""
    n = g.dim
    if not 0 <= r <= n:
        raise ComplexError("r must lie in [0, %d]" % n)
    Lset = _subcomplex_set(L)
    ref = refinement(g, alpha)
    use_alpha = lambda tau: tau in Lset or len(tau) - 1 <= r
    need = [s for s in g.complex.simplexes if not use_alpha(s)]
    ids = _Ids(g, pool, need, extra_max=max(alpha.coords, default=-1))
    tops: dict[Simplex, tuple] = {}
    for sigma, spts in g.top_frames():
        carried = carried_faces(sigma, spts, ref[sigma])
        for tau in faces(sigma):
            if tau in Lset:
                fine = list(carried.get(tau, {}).values())
                if fine != [tuple(spts[sigma.index(v)] for v in tau)]:
                    raise ComplexError("alpha disagrees with the complex on L at %r" % (tau,))
        tops.update(interpolate_frame(sigma, spts, carried, use_alpha, ids))
    return assemble(g, tops)
