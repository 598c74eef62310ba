"""Exact rational linear algebra and a small rational LP solver.

Every geometric predicate in the package bottoms out here.  Numbers are
``gmpy2.mpq``; points are plain tuples of them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from gmpy2 import mpq

Q = mpq
ZERO = mpq(0)
ONE = mpq(1)

Point = tuple


def q(x) -> mpq:
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to an exact rational.

    Floats are rejected: a float in a predicate is a bug.
    """
    if isinstance(x, float):
        raise TypeError("floating point value %r in exact context" % (x,))
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            num, den = s.split("/")
            return mpq(int(num), int(den))
        if "." in s or "e" in s.lower():
            return mpq(Fraction(s))
        return mpq(int(s))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def point(coords: Iterable) -> Point:
    return tuple(q(c) for c in coords)


def fmt(x) -> str:
    """Render a rational as ``"p/q"`` (always with a denominator)."""
    x = q(x)
    return "%d/%d" % (x.numerator, x.denominator)


def parse_point(values: Sequence) -> Point:
    return tuple(q(v) for v in values)


def fmt_point(p: Point) -> list:
    return [fmt(c) for c in p]


def add(p: Point, r: Point) -> Point:
    return tuple(a + b for a, b in zip(p, r))


def sub(p: Point, r: Point) -> Point:
    return tuple(a - b for a, b in zip(p, r))


def scale(c, p: Point) -> Point:
    return tuple(c * a for a in p)


def dot(p: Sequence, r: Sequence):
    s = ZERO
    for a, b in zip(p, r):
        s += a * b
    return s


def centroid(points: Sequence[Point]) -> Point:
    k = len(points)
    return tuple(sum(cs, ZERO) / k for cs in zip(*points))


def combination(weights: Sequence, points: Sequence[Point]) -> Point:
    dim = len(points[0])
    out = [ZERO] * dim
    for w, p in zip(weights, points):
        for i in range(dim):
            out[i] += w * p[i]
    return tuple(out)


def sign(x) -> int:
    return (x > 0) - (x < 0)


def det(rows: Sequence[Sequence]) -> mpq:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [list(map(q, r)) for r in rows]
    n = len(m)
    if n == 0:
        return ONE
    d = ONE
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            d = -d
        pv = m[col][col]
        d *= pv
        for r in range(col + 1, n):
            f = m[r][col]
            if f:
                f = f / pv
                row_r, row_c = m[r], m[col]
                for c in range(col + 1, n):
                    row_r[c] -= f * row_c[c]
    return d


def row_reduce(rows: Sequence[Sequence]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (rref rows, pivot columns)."""
    m = [list(map(q, r)) for r in rows]
    pivots = []
    if not m:
        return m, pivots
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_reduce(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: Optional[int] = None) -> list[list]:
    """Basis of the right nullspace of ``rows``."""
    if not rows:
        n = ncols or 0
        return [[ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    red, pivots = row_reduce(rows)
    ncols = len(rows[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[list]:
    """Solve ``a x = b`` for square nonsingular ``a``; None when singular."""
    n = len(a)
    aug = [list(map(q, row)) + [q(bi)] for row, bi in zip(a, b)]
    red, pivots = row_reduce(aug)
    if pivots != list(range(n)):
        return None
    return [red[i][n] for i in range(n)]


def affine_rank(points: Sequence[Point]) -> int:
    """Dimension of the affine hull (−1 for no points)."""
    if not points:
        return -1
    p0 = points[0]
    return rank([sub(p, p0) for p in points[1:]]) if len(points) > 1 else 0


def affinely_independent(points: Sequence[Point]) -> bool:
    return affine_rank(points) == len(points) - 1


def orient(points: Sequence[Point]) -> int:
    """Sign of the oriented volume of n+1 points in R^n."""
    p0 = points[0]
    return sign(det([sub(p, p0) for p in points[1:]]))


def signed_volume(points: Sequence[Point]) -> mpq:
    """n! times the signed volume of a full-dimensional simplex."""
    p0 = points[0]
    return det([sub(p, p0) for p in points[1:]])


def barycentric(x: Point, simplex: Sequence[Point]) -> Optional[list]:
    """Barycentric coordinates of ``x`` w.r.t. an affinely independent simplex.

    Works for simplices of any dimension in R^N; returns None when ``x`` is
    outside the affine hull.
    """
    k = len(simplex)
    n = len(x)
    # columns: simplex vertices, rows: coordinates + the affine row
    rows = [[simplex[j][i] for j in range(k)] + [x[i]] for i in range(n)]
    rows.append([ONE] * k + [ONE])
    red, pivots = row_reduce(rows)
    if k in pivots:
        return None
    if pivots != list(range(k)):
        raise ValueError("degenerate simplex")
    return [red[i][k] for i in range(k)]


def in_open_simplex(x: Point, simplex: Sequence[Point]) -> bool:
    lam = barycentric(x, simplex)
    return lam is not None and all(l > 0 for l in lam)


def in_closed_simplex(x: Point, simplex: Sequence[Point]) -> bool:
    lam = barycentric(x, simplex)
    return lam is not None and all(l >= 0 for l in lam)


def hyperplane(points: Sequence[Point]) -> tuple[list, mpq]:
    """Hyperplane ``a.x = b`` through n affinely independent points of R^n."""
    n = len(points[0])
    rows = [list(p) + [-ONE] for p in points]
    ns = nullspace(rows, n + 1)
    if len(ns) != 1:
        raise ValueError("points do not span a hyperplane")
    v = ns[0]
    return v[:n], v[n]


def bbox(points: Iterable[Point]) -> tuple[Point, Point]:
    pts = list(points)
    return (tuple(min(c) for c in zip(*pts)), tuple(max(c) for c in zip(*pts)))


def boxes_overlap(b1, b2) -> bool:
    return all(l1 <= h2 and l2 <= h1 for l1, h1, l2, h2 in zip(b1[0], b1[1], b2[0], b2[1]))


# ---------------------------------------------------------------------------
# exact linear programming


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Optional[list] = None
    value: Optional[mpq] = None


def _pivot(tab: list[list], obj: list, pr: int, pc: int) -> None:
    prow = tab[pr]
    pv = prow[pc]
    if pv != 1:
        prow[:] = [x / pv for x in prow]
    nz = [j for j, x in enumerate(prow) if x]
    for i, row in enumerate(tab):
        if i != pr:
            f = row[pc]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    f = obj[pc]
    if f:
        for j in nz:
            obj[j] -= f * prow[j]


def _simplex_iterate(tab, obj, basis, allowed) -> str:
    """Maximise; ``obj`` holds reduced costs (negative = improving)."""
    rhs = len(tab[0]) - 1 if tab else 0
    while True:
        pc = None
        for j in allowed:
            if obj[j] < 0:
                pc = j
                break
        if pc is None:
            return "optimal"
        pr = None
        best = None
        for i, row in enumerate(tab):
            a = row[pc]
            if a > 0:
                ratio = row[rhs] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[pr]):
                    best, pr = ratio, i
        if pr is None:
            return "unbounded"
        _pivot(tab, obj, pr, pc)
        basis[pr] = pc


def lp_max(c: Sequence, a_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
           a_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> LPResult:
    """Maximise ``c.x`` subject to ``a_ub x <= b_ub``, ``a_eq x = b_eq``, ``x >= 0``.

    Dense two-phase tableau simplex over the rationals with Bland's rule,
    so it terminates and every answer is exact.
    """
    n = len(c)
    m_ub, m_eq = len(a_ub), len(a_eq)
    m = m_ub + m_eq
    nvar = n + m_ub + m  # structural, slacks, artificials
    tab = []
    for i in range(m):
        row = [ZERO] * (nvar + 1)
        if i < m_ub:
            coeffs, rhs = a_ub[i], q(b_ub[i])
            row[n + i] = ONE
        else:
            coeffs, rhs = a_eq[i - m_ub], q(b_eq[i - m_ub])
        for j, v in enumerate(coeffs):
            row[j] = q(v)
        row[nvar] = rhs
        if rhs < 0:
            row = [-x for x in row]
        row[n + m_ub + i] = ONE
        tab.append(row)
    basis = [n + m_ub + i for i in range(m)]
    art = set(basis)

    # phase 1: maximise -sum(artificials)
    obj = [ZERO] * (nvar + 1)
    for j in art:
        obj[j] = ONE
    for row in tab:
        for j in range(nvar + 1):
            if row[j]:
                obj[j] -= row[j]
    for j in art:
        obj[j] = ZERO
    _simplex_iterate(tab, obj, basis, range(nvar))
    if obj[nvar] < 0:
        return LPResult("infeasible")

    # drive artificials out of the basis
    keep = []
    for i in range(len(tab)):
        if basis[i] in art:
            pc = next((j for j in range(n + m_ub) if tab[i][j] != 0), None)
            if pc is None:
                continue  # redundant row
            _pivot(tab, obj, i, pc)
            basis[i] = pc
        keep.append(i)
    tab = [tab[i] for i in keep]
    basis = [basis[i] for i in keep]
    for row in tab:
        for j in art:
            row[j] = ZERO

    # phase 2
    obj = [ZERO] * (nvar + 1)
    for j, v in enumerate(c):
        obj[j] = -q(v)
    for i, b in enumerate(basis):
        f = obj[b]
        if f:
            row = tab[i]
            for j in range(nvar + 1):
                if row[j]:
                    obj[j] -= f * row[j]
    status = _simplex_iterate(tab, obj, basis, range(n + m_ub))
    if status == "unbounded":
        return LPResult("unbounded")
    x = [ZERO] * n
    for i, b in enumerate(basis):
        if b < n:
            x[b] = tab[i][nvar]
    return LPResult("optimal", x, obj[nvar])


def lp_max_free(c: Sequence, a_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
                a_eq: Sequence[Sequence] = (), b_eq: Sequence = (),
                free: Iterable[int] = ()) -> LPResult:
    """``lp_max`` where the variables listed in ``free`` are unrestricted in sign."""
    free = sorted(set(free))
    if not free:
        return lp_max(c, a_ub, b_ub, a_eq, b_eq)
    n = len(c)

    def split(row):
        row = list(row)
        return row + [-row[j] for j in free]

    res = lp_max(split(c), [split(r) for r in a_ub], b_ub, [split(r) for r in a_eq], b_eq)
    if res.status != "optimal":
        return res
    x = res.x[:n]
    for k, j in enumerate(free):
        x[j] -= res.x[n + k]
    return LPResult("optimal", x, res.value)
