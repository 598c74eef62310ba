"""Shared fixtures-as-functions and independent oracles for the test suite.

The oracles here deliberately avoid geoflip.exact: they use fractions.Fraction
and textbook formulas so that they can disagree with the library.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction as F

from geoflip import exact
from geoflip.complex import GeometricComplex, ManifoldComplex, SimplicialComplex, link
from geoflip.moves import BISTELLAR, STELLAR_SUBDIVIDE, MoveError, record

Q = exact.q


def G(tops, pts, model="euclidean"):
    """Euclidean complex with vertex i at pts[i]."""
    return GeometricComplex(SimplicialComplex(tops), {i: exact.point(p) for i, p in enumerate(pts)}, model)


SQUARE = [(0, 0), (1, 0), (1, 1), (0, 1)]
SQUARE_BOUNDARY = [(0, 1), (1, 2), (2, 3), (0, 3)]


def square(diagonal="02"):
    tops = [(0, 1, 2), (0, 2, 3)] if diagonal == "02" else [(0, 1, 3), (1, 2, 3)]
    return G(tops, SQUARE)


def unit_simplex(n):
    pts = [tuple([0] * n)] + [tuple(int(i == j) for j in range(n)) for i in range(n)]
    return G([tuple(range(n + 1))], pts)


PENTAGON = [(0, 0), (4, 0), (4, 3), (2, 1), (0, 3)]


def pentagon_pair():
    """Two triangulations of a star-shaped pentagon with a reflex vertex at (2, 1)."""
    a = G([(0, 1, 3), (1, 2, 3), (0, 3, 4)], PENTAGON)
    b = G([(0, 1, 5), (1, 2, 5), (2, 3, 5), (3, 4, 5), (0, 4, 5)], PENTAGON + [(2, F(1, 2))])
    return a, b


TWIST_INNER = [(-1, -1), (2, -1), (-1, 2)]
TWIST_POINTS = TWIST_INNER + [(4 * x, 4 * y) for x, y in TWIST_INNER]
_RING = [(0, 1), (1, 2), (2, 0)]


def twisted(mirror=False):
    """Nested triangles joined by a spiral: 6 points, 7 triangles, not regular."""
    if mirror:
        ring = [(3 + i, 3 + j, i) for i, j in _RING] + [(i, j, 3 + j) for i, j in _RING]
    else:
        ring = [(3 + i, 3 + j, j) for i, j in _RING] + [(3 + i, j, i) for i, j in _RING]
    return G([(0, 1, 2)] + ring, TWIST_POINTS)


def torus_grid(n, northeast=True):
    """Flat unit torus, n x n grid, every square split by the same diagonal."""
    vid = lambda i, j: (i % n) * n + (j % n)
    coords = {vid(i, j): (Q(i) / n, Q(j) / n) for i in range(n) for j in range(n)}
    tops = []
    for i in range(n):
        for j in range(n):
            if northeast:
                cells = [((i, j), (i + 1, j), (i + 1, j + 1)), ((i, j), (i, j + 1), (i + 1, j + 1))]
            else:
                cells = [((i, j), (i + 1, j), (i, j + 1)), ((i + 1, j), (i + 1, j + 1), (i, j + 1))]
            for t in cells:
                s = [vid(*x) for x in t]
                order = sorted(range(3), key=lambda k: s[k])
                tops.append((tuple(s[k] for k in order), tuple((Q(t[k][0]) / n, Q(t[k][1]) / n) for k in order)))
    return ManifoldComplex(SimplicialComplex([t for t, _ in tops]), coords, dict(tops), (1, 1))


def torus_block_boundary(n=3):
    """The 8 grid edges bounding the 2x2 block of squares around vertex 0."""
    vid = lambda i, j: (i % n) * n + (j % n)
    ring = [(-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0)]
    return [tuple(sorted((vid(*ring[k]), vid(*ring[(k + 1) % 8])))) for k in range(8)]


# ---------------------------------------------------------------------------
# independent exact oracles


def frac(x):
    return F(int(x.numerator), int(x.denominator)) if hasattr(x, "numerator") else F(x)


def leibniz_det(m):
    """Determinant by the permutation expansion (tiny matrices only)."""
    n = len(m)
    total = F(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = F(-1 if inv % 2 else 1)
        for i in range(n):
            term *= frac(m[i][perm[i]])
        total += term
    return total


def orientation(pts):
    """Sign of det[p_i - p_0]."""
    p0 = pts[0]
    d = leibniz_det([[frac(a) - frac(b) for a, b in zip(p, p0)] for p in pts[1:]])
    return (d > 0) - (d < 0)


def in_closed(x, pts):
    """x lies in the closed simplex: replacing any vertex by x never flips the orientation."""
    o = orientation(pts)
    for i in range(len(pts)):
        q = list(pts)
        q[i] = x
        oi = orientation(q)
        if oi and oi != o:
            return False
    return True


def covers(g, x):
    return any(in_closed(x, list(pts)) for _, pts in g.top_frames())


def sample_points(g, rng, k=30):
    lo, hi = exact.bbox(g.coords.values())
    out = []
    for _ in range(k):
        out.append(tuple(frac(a) + (frac(b) - frac(a)) * F(rng.randint(0, 997), 997) for a, b in zip(lo, hi)))
    return out


def same_support(g1, g2, rng, k=30):
    if g1.volume() != g2.volume():
        return False
    return all(covers(g1, x) == covers(g2, x) for x in sample_points(g1, rng, k))


def random_generic_points(rng, n, dim, lo=0, hi=60):
    """Integer points with no dim+1 on a hyperplane and no dim+2 on a sphere."""
    while True:
        pts = [tuple(rng.randint(lo, hi) for _ in range(dim)) for _ in range(n)]
        if len(set(pts)) < n:
            continue
        if any(orientation(list(c)) == 0 for c in itertools.combinations(pts, dim + 1)):
            continue
        lifted = lambda p: [F(c) for c in p] + [F(sum(c * c for c in p)), F(1)]
        if dim == 2 and any(leibniz_det([lifted(p) for p in c]) == 0 for c in itertools.combinations(pts, 4)):
            continue
        if dim == 3 and len(pts) <= 8 and any(leibniz_det([lifted(p) for p in c]) == 0
                                              for c in itertools.combinations(pts, 5)):
            continue
        return pts


def delaunay(pts):
    """Delaunay complex of integer points, topology from scipy, coordinates exact."""
    from scipy.spatial import Delaunay
    import numpy as np
    tri = Delaunay(np.array(pts, dtype=float))
    return G([tuple(int(v) for v in s) for s in tri.simplices], pts)


def rng(seed):
    return random.Random(seed)


def random_moves(g, r, count):
    """Try random moves on g, yielding (before, move, after) for the valid ones."""
    tried = 0
    while count and tried < 40 * count:
        tried += 1
        kind = r.random()
        tops = sorted(g.complex.maximal)
        if kind < 0.35:
            s = r.choice(sorted(x for x in g.complex.simplexes if len(x) >= 2))
            w = [r.randint(1, 5) for _ in s]
            a = exact.combination([Q(x) / sum(w) for x in w], g.points(s))
            args = (STELLAR_SUBDIVIDE, s, None, a)
        elif kind < 0.55:
            s = r.choice(tops)
            w = [r.randint(1, 5) for _ in s]
            args = (BISTELLAR, s, None, exact.combination([Q(x) / sum(w) for x in w], g.points(s)))
        else:
            a = r.choice(sorted(g.complex.simplexes))
            lk = link(a, g.complex)
            b = tuple(sorted(lk.vertices))
            if len(a) + len(b) != g.dim + 2:
                continue
            args = (BISTELLAR, a, b, None)
        try:
            new, m = record(g, *args)
        except MoveError:
            continue
        yield g, m, new
        g = new
        count -= 1
