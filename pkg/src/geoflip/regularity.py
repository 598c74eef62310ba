"""Height functions and regularity certificates.

A triangulation is regular when some height function, affine on every top
simplex, bends strictly convexly across every interior codimension-one face.
Each such face contributes one linear inequality in the heights; strictness
is enforced with a fixed margin, which loses nothing because the system is
homogeneous.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional

from . import exact
from .complex import ComplexError, GeometricComplex, fingerprint
from .moves import derived_subdivision

log = logging.getLogger(__name__)

HeightFunction = dict  # vertex id -> rational


class RegularityError(ComplexError):
    pass


class FixedHeightsInfeasible(RegularityError):
    """The convexity system is feasible, but not with the requested fixed heights."""


class RegularizeExhausted(RegularityError):
    def __init__(self, s_max: int):
        super().__init__("no regular derived subdivision found up to s_max = %d" % s_max)
        self.s_max = s_max


@dataclass
class RegularityCertificate:
    fingerprint: str
    heights: dict
    s: int
    complex: Optional[GeometricComplex] = None


def convexity_rows(g: GeometricComplex) -> list[dict]:
    """One linear form per interior facet; the heights are regular iff every form is > 0.

    For the facet F between top simplexes s1 and s2 the form is
    h(v2) - (affine interpolation of h on s1 evaluated at v2), where v2 is
    the vertex of s2 opposite F.
    """
    if not g.complex.is_pure:
        raise RegularityError("regularity needs a pure complex")
    rows = []
    for f, cof in sorted(g.complex.facet_cofaces().items()):
        if len(cof) != 2:
            continue
        s1, s2 = cof
        chart = g.develop([s1, s2], f[0])
        (v2,) = set(s2) - set(f)
        pts = [chart[v] for v in s1]
        lam = exact.barycentric(chart[v2], pts)
        if lam is None:
            raise RegularityError("degenerate simplex %r" % (s1,))
        row = {v2: exact.ONE}
        for v, l in zip(s1, lam):
            row[v] = row.get(v, exact.ZERO) - l
        rows.append(row)
    return rows


def margins(g: GeometricComplex, h: Mapping[int, object]) -> list:
    missing = [v for v in g.vertices if v not in h]
    if missing:
        raise RegularityError("no height for vertices %r" % (missing,))
    hq = {v: exact.q(x) for v, x in h.items()}
    return [sum((c * hq[v] for v, c in row.items()), exact.ZERO) for row in convexity_rows(g)]


def is_regular(g: GeometricComplex, h: Mapping[int, object]) -> bool:
    """Exact test that ``h`` is strictly convex across every interior facet."""
    return all(m > 0 for m in margins(g, h))


def _float_solve(rows, variables, fixed, margin):
    try:
        import numpy as np
        from scipy.optimize import linprog
    except ImportError:  # pragma: no cover
        return None
    index = {v: i for i, v in enumerate(variables)}
    a = np.zeros((len(rows), len(variables)))
    for i, row in enumerate(rows):
        for v, c in row.items():
            a[i, index[v]] = -float(c)
    target = float(margin) * 1.001 + 1e-6
    b = np.full(len(rows), -target)
    a_eq = b_eq = None
    if fixed:
        a_eq = np.zeros((len(fixed), len(variables)))
        b_eq = np.zeros(len(fixed))
        for i, (v, x) in enumerate(sorted(fixed.items())):
            a_eq[i, index[v]] = 1.0
            b_eq[i] = float(x)
    res = linprog(np.zeros(len(variables)), A_ub=a, b_ub=b, A_eq=a_eq, b_eq=b_eq,
                  bounds=[(None, None)] * len(variables), method="highs")
    if res.status == 2:
        return "infeasible"
    if res.status != 0:
        return None
    h = {}
    for v, x in zip(variables, res.x):
        h[v] = exact.q(Fraction(float(x)).limit_denominator(10 ** 9))
    for v, x in fixed.items():
        h[v] = exact.q(x)
    return h


def _exact_solve(rows, variables, fixed, margin):
    index = {v: i for i, v in enumerate(variables)}
    a_ub, b_ub = [], []
    for row in rows:
        r = [exact.ZERO] * len(variables)
        for v, c in row.items():
            r[index[v]] = -c
        a_ub.append(r)
        b_ub.append(-exact.q(margin))
    a_eq, b_eq = [], []
    for v, x in sorted(fixed.items()):
        r = [exact.ZERO] * len(variables)
        r[index[v]] = exact.ONE
        a_eq.append(r)
        b_eq.append(exact.q(x))
    res = exact.lp_max_free([0] * len(variables), a_ub, b_ub, a_eq, b_eq, free=range(len(variables)))
    if res.status == "infeasible":
        return None
    return {v: res.x[index[v]] for v in variables}


def find_heights(g: GeometricComplex, fixed: Optional[Mapping[int, object]] = None,
                 margin=1, method: str = "auto") -> Optional[HeightFunction]:
    """Heights with convexity margin >= ``margin`` on every interior facet, or None.

    ``method="exact"`` runs only the rational simplex solver.  ``"auto"``
    first tries a floating-point LP and accepts its rounded answer only after
    an exact margin check; every infeasibility verdict comes from the exact
    solver.
    """
    fixed = {int(v): exact.q(x) for v, x in (fixed or {}).items()}
    unknown = [v for v in fixed if v not in g.coords]
    if unknown:
        raise RegularityError("fixed heights for unknown vertices %r" % (unknown,))
    margin = exact.q(margin)
    if margin <= 0:
        raise RegularityError("margin must be positive")
    rows = convexity_rows(g)
    variables = g.vertices
    if not rows:
        return {v: fixed.get(v, exact.ZERO) for v in variables}
    h = None
    if method == "auto":
        h = _float_solve(rows, variables, fixed, margin)
        if isinstance(h, dict):
            if all(sum((c * h[v] for v, c in row.items()), exact.ZERO) >= margin for row in rows):
                return h
            log.debug("rounded float heights failed the exact check; falling back")
    h = _exact_solve(rows, variables, fixed, margin)
    if h is None and fixed:
        if _exact_solve(rows, variables, {}, margin) is not None:
            raise FixedHeightsInfeasible("the fixed heights are incompatible with strict convexity")
    return h


def regularize(g: GeometricComplex, L=None, s_max: int = 3, s_min: int = 0,
               subdivide: Optional[Callable[[GeometricComplex], GeometricComplex]] = None,
               method: str = "auto") -> RegularityCertificate:
    """Smallest s in [s_min, s_max] whose s-th derived subdivision is regular."""
    if subdivide is None:
        subdivide = lambda c: derived_subdivision(c, L)
    cur = g
    for s in range(s_max + 1):
        if s >= s_min:
            h = find_heights(cur, method=method)
            if h is not None:
                return RegularityCertificate(fingerprint(cur), h, s, cur)
        if s < s_max:
            cur = subdivide(cur)
    raise RegularizeExhausted(s_max)
