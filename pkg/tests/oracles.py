"""Brute-force oracles that share no code with the library's solvers."""

from __future__ import annotations

import itertools
from fractions import Fraction as F

from helpers import frac, leibniz_det, orientation


def _lift_cofactors(pts):
    """Coefficients c_i with det[[p_i, h_i, 1]] = sum_i c_i h_i."""
    n = len(pts)
    rows = [[frac(x) for x in p] for p in pts]
    col = len(pts[0])
    out = []
    for i in range(n):
        minor = [r + [F(1)] for j, r in enumerate(rows) if j != i]
        sign = -1 if (i + col) % 2 else 1
        out.append(sign * leibniz_det(minor))
    return out


def lifted_rows(g):
    """One linear form in the heights per interior facet, positive iff locally convex.

    Built from the lifted (n+2)x(n+2) determinant of s1 plus the opposite
    vertex of s2, scaled by the orientation of s1.
    """
    by_facet = {}
    for s in g.complex.maximal:
        for i in range(len(s)):
            by_facet.setdefault(s[:i] + s[i + 1:], []).append(s)
    rows = []
    for f, cof in sorted(by_facet.items()):
        if len(cof) != 2:
            continue
        s1, s2 = cof
        (v2,) = set(s2) - set(f)
        verts = list(s1) + [v2]
        pts = [g.coords[v] for v in verts]
        coeff = _lift_cofactors(pts)
        o = orientation([g.coords[v] for v in s1])
        # the coefficient of h(v2) is the cofactor of the last row, which is
        # (-1)^(n+1) times the orientation determinant of s1
        sign = o * (-1 if len(pts[0]) % 2 == 0 else 1)
        row = {}
        for v, c in zip(verts, coeff):
            row[v] = row.get(v, F(0)) + sign * c
        rows.append(row)
    return rows


def fourier_motzkin_strict(rows, variables):
    """Feasibility of {row . h > 0 for every row} by Fourier-Motzkin elimination.

    All inequalities are homogeneous and strict, so after eliminating every
    variable the system is feasible iff no inequality is left.
    """
    system = [{v: F(c) for v, c in r.items() if c != 0} for r in rows]
    if any(not r for r in system):
        return False
    for x in variables:
        pos = [r for r in system if r.get(x, 0) > 0]
        neg = [r for r in system if r.get(x, 0) < 0]
        rest = [r for r in system if r.get(x, 0) == 0]
        for p in pos:
            for n in neg:
                combo = {}
                for v in set(p) | set(n):
                    c = p.get(v, 0) / p[x] + n.get(v, 0) / -n[x]
                    if c != 0:
                        combo[v] = c
                if not combo:
                    return False
                rest.append(combo)
        system = _dedupe(rest)
    return not system


def _dedupe(system):
    seen = set()
    out = []
    for r in system:
        # normalise by the first nonzero coefficient's absolute value
        k = next(iter(sorted(r)))
        scale = abs(r[k])
        key = tuple(sorted((v, c / scale) for v, c in r.items()))
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def substitute(rows, fixed):
    out = []
    for r in rows:
        const = sum((c * F(fixed[v]) for v, c in r.items() if v in fixed), F(0))
        assert const == 0, "only zero pins keep the system homogeneous"
        out.append({v: c for v, c in r.items() if v not in fixed})
    return out


def upper_facets(g):
    """Boundary facets whose opposite vertex lies on the other side from straight up."""
    cof = {}
    for s in g.complex.maximal:
        for v in s:
            cof.setdefault(tuple(x for x in s if x != v), []).append(v)
    out = set()
    for f, opp in cof.items():
        if len(opp) != 1:
            continue
        pts = [g.coords[v] for v in f]
        up = tuple(sum(frac(p[i]) for p in pts) / len(pts) for i in range(2)) + \
            (sum(frac(p[2]) for p in pts) / len(pts) + 1,)
        if orientation(pts + [g.coords[opp[0]]]) != orientation(pts + [up]):
            out.add(f)
    return out


# ---------------------------------------------------------------------------
# flip graph of planar triangulations


def _orient2(a, b, c):
    d = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (d > 0) - (d < 0)


def as_point_triangulation(g):
    """Triangles as frozensets of Fraction points (labels forgotten)."""
    pt = {v: tuple(frac(x) for x in p) for v, p in g.coords.items()}
    return frozenset(frozenset(pt[v] for v in s) for s in g.complex.maximal)


def flip_neighbours(tris, fixed_points, candidates):
    """All triangulations one geometric 2-2, 1-3 or 3-1 flip away.

    Inserted vertices come from ``candidates``; points in ``fixed_points``
    are never removed.
    """
    edges = {}
    for t in tris:
        for e in itertools.combinations(sorted(t), 2):
            edges.setdefault(frozenset(e), []).append(t)
    out = []
    for e, ts in edges.items():
        if len(ts) != 2:
            continue
        a, b = tuple(e)
        (c,) = ts[0] - e
        (d,) = ts[1] - e
        convex = _orient2(a, b, c) * _orient2(a, b, d) < 0 and _orient2(c, d, a) * _orient2(c, d, b) < 0
        if convex and frozenset((c, d)) not in edges:
            out.append((tris - {ts[0], ts[1]}) | {frozenset((a, c, d)), frozenset((b, c, d))})
    used = set().union(*tris)
    for p in candidates:
        if p in used:
            continue
        for t in tris:
            a, b, c = tuple(t)
            s = {_orient2(a, b, p), _orient2(b, c, p), _orient2(c, a, p)}
            if len(s) == 1 and 0 not in s:
                out.append((tris - {t}) | {frozenset((a, b, p)), frozenset((b, c, p)), frozenset((c, a, p))})
    for v in used - set(fixed_points):
        star_ = [t for t in tris if v in t]
        if len(star_) == 3:
            a, b, c = tuple(set().union(*star_) - {v})
            if _orient2(a, b, c) != 0:
                out.append((tris - set(star_)) | {frozenset((a, b, c))})
    return out


def flip_reachable(start, goal, fixed_points, candidates):
    """Bidirectional breadth-first search over the flip graph; returns (reachable, states seen)."""
    if start == goal:
        return True, 1
    seen_a, seen_b = {start}, {goal}
    front_a, front_b = [start], [goal]
    while front_a and front_b:
        if len(front_a) > len(front_b):
            front_a, front_b, seen_a, seen_b = front_b, front_a, seen_b, seen_a
        nxt = []
        for t in front_a:
            for n in flip_neighbours(t, fixed_points, candidates):
                if n in seen_b:
                    return True, len(seen_a) + len(seen_b)
                if n not in seen_a:
                    seen_a.add(n)
                    nxt.append(n)
        front_a = nxt
    return False, len(seen_a) + len(seen_b)
