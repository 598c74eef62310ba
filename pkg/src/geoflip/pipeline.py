"""End-to-end connection of two geometric triangulations of the same space.

Both inputs are related to their common subdivision alpha through a tower of
interpolating subdivisions; every step of a tower changes the triangulation
inside the star of a single simplex, and that change is realized by a
star-convex cone-and-sweep connection computed in a flat chart of the star.
The moves are recorded with position-keyed vertex ids so that all local
pieces compose into one sequence on the s-th derived subdivision.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional

from . import exact
from .charts import ChartError, common_refinement, develop_star, is_subdivision_of, triangulate_polytopal
from .complex import (ComplexError, GeometricComplex, Simplex, VertexPool, as_simplex, assemble,
                      complexes_equal, faces, fingerprint)
from .moves import (FlipSequence, Move, apply_sequence, carried_faces, derived_subdivision,
                    interpolate_frame, interpolating_subdivision, refinement)
from .regularity import RegularizeExhausted
from .sweep import SweepError, star_connection

log = logging.getLogger(__name__)


class HypothesisError(ComplexError):
    """The inputs do not satisfy the hypotheses of the connection theorem."""


class StarExhausted(RegularizeExhausted):
    def __init__(self, s_max: int, side: int, phase: str, simplex: Simplex):
        ComplexError.__init__(self, "no regular cone up to s_max = %d in the star of %r (side %d, %s tower)"
                              % (s_max, simplex, side, phase))
        self.s_max = s_max
        self.side, self.phase, self.simplex = side, phase, simplex


@dataclass
class ConnectResult:
    s: int
    sequence: FlipSequence
    fixed: frozenset
    start: GeometricComplex
    end: GeometricComplex
    stats: dict = field(default_factory=dict)


def _closure(simplexes: Iterable[Simplex]) -> set:
    out = set()
    for s in simplexes:
        out.update(faces(as_simplex(s)))
    return out


class _Tower:
    """The interpolating subdivisions between K and a subdivision alpha of K.

    A state is given by the level r and the set ``done`` of r-simplexes that
    are already coned; faces in L, faces below dimension r and unconverted
    r-faces carry alpha, every other face is coned from its barycenter.
    """

    def __init__(self, k: GeometricComplex, alpha: Optional[GeometricComplex], lset: set, pool: VertexPool):
        self.k, self.lset, self.pool = k, lset, pool
        self.carried = {}
        if alpha is None:
            for s, pts in k.top_frames():
                self.carried[s] = {tau: {tau: tuple(pts[s.index(v)] for v in tau)} for tau in faces(s)}
            self.frames = dict(k.top_frames())
        else:
            ref = refinement(k, alpha)
            self.frames = dict(k.top_frames())
            for s, pts in self.frames.items():
                self.carried[s] = carried_faces(s, pts, ref[s])

    def use_alpha(self, r: int, done: set):
        lset = self.lset
        return lambda tau: tau in lset or len(tau) - 1 < r or (len(tau) - 1 == r and tau not in done)

    def star(self, a: Simplex, r: int, done: set) -> GeometricComplex:
        """The tower state restricted to st(a, K), in a flat chart of that star."""
        chart = develop_star(self.k, a)
        ids = lambda f, p: self.pool.id_for(self.k.canonical(p))
        tops = {}
        for s in chart.complex.maximal:
            cpts = chart.points(s)
            shift = exact.sub(cpts[0], self.frames[s][0])
            carried = {tau: {f: tuple(exact.add(p, shift) for p in pts) for f, pts in fine.items()}
                       for tau, fine in self.carried[s].items()}
            tops.update(interpolate_frame(s, cpts, carried, self.use_alpha(r, done), ids))
        return assemble(chart, tops)


def _lift_moves(moves, key) -> list:
    out = []
    for m in moves:
        if m.point is not None:
            m = Move(m.kind, m.A, m.B, m.vertex, key(m.point))
        out.append(m)
    return out


def fixed_simplexes(start: GeometricComplex, base: GeometricComplex, lset: set) -> frozenset:
    """Simplexes of the subdivision ``start`` of ``base`` lying in |L|."""
    if not lset:
        return frozenset()
    ref = refinement(base, start)
    out = set()
    for s, cells in ref.items():
        spts = base.points(s)
        for t, tpts in cells:
            frame = dict(zip(t, tpts))
            supp = {v: {s[i] for i, l in enumerate(exact.barycentric(frame[v], spts)) if l != 0} for v in t}
            for f in faces(t):
                carrier = as_simplex(set().union(*(supp[v] for v in f)))
                if carrier in lset:
                    out.add(f)
    tops = [f for f in out if not any(len(g) > len(f) and set(f) < set(g) for g in out)]
    return frozenset(tops)


def connect_geometric(g1: GeometricComplex, g2: GeometricComplex, L: Iterable = (), s_max: int = 3,
                      common: Optional[GeometricComplex] = None, verify: bool = True,
                      on_step=None) -> ConnectResult:
    """A verified flip sequence from beta^s g1 to beta^s g2 keeping beta^s L fixed."""
    t0 = time.perf_counter()
    timing = {}
    if g1.model != g2.model or g1.periods != g2.periods or g1.ambient_dim != g2.ambient_dim:
        raise HypothesisError("the triangulations live in different spaces")
    if g1.dim != g1.ambient_dim or g2.dim != g2.ambient_dim:
        raise HypothesisError("the triangulations must be full-dimensional")
    pool = VertexPool()
    pool.register(g1)
    g2 = g2.relabel({v: pool.id_for(p) for v, p in g2.coords.items()})
    L = [as_simplex(s) for s in L]
    for s in L:
        if s not in g1.complex or s not in g2.complex:
            raise HypothesisError("L simplex %r is not common to both triangulations" % (s,))
    lset = _closure(L)
    for side, g in enumerate((g1, g2), 1):
        bd = g.complex.boundary_complex().maximal
        if not set(bd) <= lset:
            raise HypothesisError("L does not contain the boundary of triangulation %d" % side)
    if complexes_equal(g1, g2):
        seq = FlipSequence([], fingerprint(g1), fingerprint(g1), frozenset(L), dict(g1.coords))
        return ConnectResult(0, seq, frozenset(L), g1, g2, {"moves": 0, "counts": {}, "stars": 0})

    if common is None:
        try:
            alpha = triangulate_polytopal(common_refinement(g1, g2, pool), L, pool)
        except ChartError as e:
            raise HypothesisError(str(e)) from e
    else:
        alpha = common.relabel({v: pool.id_for(p) for v, p in common.coords.items()})
    for g in (g1, g2):
        if not is_subdivision_of(alpha, g):
            raise HypothesisError("the common subdivision does not subdivide both triangulations")
    timing["refinement"] = time.perf_counter() - t0

    n = g1.ambient_dim
    towers = []
    for side, g in enumerate((g1, g2), 1):
        t = time.perf_counter()
        for phase, a in (("trivial", None), ("alpha", alpha)):
            tw = _Tower(g, a, lset, pool)
            _check_tower(g, a, L, pool)
            towers.append((side, phase, tw))
        timing["towers-%d" % side] = time.perf_counter() - t

    s = 0
    while True:
        try:
            pieces, nstars = _run_towers(towers, n, lset, s, s_max, pool)
            break
        except _Escalate as e:
            log.info("escalating to s = %d", e.s)
            s = e.s
    timing["stars"] = time.perf_counter() - t0 - sum(timing.values())

    moves = []
    by_side = {1: [], 2: []}
    for side, phase, seq_moves in pieces:
        if phase == "trivial":
            by_side[side].append(seq_moves)
        else:
            by_side[side].append([m.inverse() for m in reversed(seq_moves)])
    side1 = by_side[1][0] + by_side[1][1]
    side2 = by_side[2][0] + by_side[2][1]
    moves = side1 + [m.inverse() for m in reversed(side2)]

    t = time.perf_counter()
    start = _derived(g1, s, pool)
    end = _derived(g2, s, pool)
    fixed = fixed_simplexes(start, g1, lset)
    seq = FlipSequence(moves, fingerprint(start), fingerprint(end), fixed, dict(start.coords))
    timing["assemble"] = time.perf_counter() - t
    if verify:
        t = time.perf_counter()
        out = apply_sequence(start, seq, on_step)
        if not complexes_equal(out, end):
            raise ComplexError("replay did not reach beta^s of the second triangulation")
        timing["verify"] = time.perf_counter() - t
    counts = Counter(m.label for m in moves)
    stats = {"moves": len(moves), "counts": dict(sorted(counts.items())), "stars": nstars,
             "start_tops": len(start.complex.maximal), "end_tops": len(end.complex.maximal),
             "timing": timing, "total_seconds": time.perf_counter() - t0}
    return ConnectResult(s, seq, fixed, start, end, stats)


class _Escalate(Exception):
    def __init__(self, s: int):
        self.s = s


def _derived(g: GeometricComplex, s: int, pool: VertexPool) -> GeometricComplex:
    for _ in range(s):
        g = derived_subdivision(g, pool=pool)
    return g


def _check_tower(g, alpha, L, pool) -> None:
    """The tower starts at alpha and ends at the derived subdivision relative to L."""
    if alpha is None:
        return
    top = interpolating_subdivision(g, alpha, L, g.dim, pool)
    if not complexes_equal(top, alpha):
        raise ComplexError("top of the interpolating tower differs from alpha")
    bottom = interpolating_subdivision(g, alpha, L, 0, pool)
    if not complexes_equal(bottom, derived_subdivision(g, L, pool=pool)):
        raise ComplexError("bottom of the interpolating tower differs from the relative derived subdivision")


def _run_towers(towers, n, lset, s, s_max, pool):
    pieces = []
    nstars = 0
    for side, phase, tw in towers:
        moves = []
        for r in range(n, 0, -1):
            done: set = set()
            for a in tw.k.complex.of_dim(r):
                if a in lset:
                    continue
                before = tw.star(a, r, done)
                done.add(a)
                after = tw.star(a, r, done)
                if complexes_equal(before, after):
                    continue
                nstars += 1
                try:
                    res = star_connection(before, after, s_max=s_max, s_min=s, pool=pool, key=tw.k.canonical)
                except RegularizeExhausted as e:
                    raise StarExhausted(s_max, side, phase, a) from e
                except SweepError as e:
                    raise HypothesisError("star of %r (side %d): %s" % (a, side, e)) from e
                if res.s > s:
                    raise _Escalate(res.s)
                moves.extend(_lift_moves(res.sequence.moves, tw.k.canonical))
        pieces.append((side, phase, moves))
    return pieces, nstars
