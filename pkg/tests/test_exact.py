from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from geoflip import exact
from helpers import frac, leibniz_det

small = st.integers(-6, 6)
ratio = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def matrices(n):
    return st.lists(st.lists(ratio, min_size=n, max_size=n), min_size=n, max_size=n)


@given(st.integers(1, 4).flatmap(matrices))
def test_det_matches_permutation_expansion(m):
    assert frac(exact.det(m)) == leibniz_det(m)


@given(matrices(3), st.lists(ratio, min_size=3, max_size=3))
def test_solve_satisfies_the_system(a, b):
    x = exact.solve(a, b)
    if leibniz_det(a) == 0:
        assert x is None
    else:
        assert [sum(frac(r[j]) * frac(x[j]) for j in range(3)) for r in a] == [F(v) for v in b]


def test_fmt_is_always_a_fraction():
    assert exact.fmt(0) == "0/1"
    assert exact.fmt(exact.q("3/6")) == "1/2"
    assert exact.fmt(-2) == "-2/1"
    assert exact.parse_point(["1/3", "-4/1"]) == (exact.q(1) / 3, exact.q(-4))


def test_nullspace_vectors_are_killed():
    rows = [[1, 2, 3], [2, 4, 6]]
    ns = exact.nullspace(rows)
    assert len(ns) == 2
    for v in ns:
        assert all(exact.dot(r, v) == 0 for r in rows)


@given(st.lists(st.tuples(small, small), min_size=3, max_size=3, unique=True),
       st.lists(st.integers(1, 9), min_size=3, max_size=3))
def test_barycentric_recovers_weights(pts, w):
    pts = [exact.point(p) for p in pts]
    x = exact.combination([exact.q(c) / sum(w) for c in w], pts)
    if exact.affinely_independent(pts):
        assert exact.barycentric(x, pts) == [exact.q(c) / sum(w) for c in w]
        assert exact.in_open_simplex(x, pts)
    else:
        with pytest.raises(ValueError):
            exact.barycentric(x, pts)


def test_orientation_and_volume():
    tri = [exact.point(p) for p in [(0, 0), (1, 0), (0, 1)]]
    assert exact.orient(tri) == 1
    assert exact.orient(tri[::-1]) == -1
    assert exact.signed_volume(tri) == 1
    assert exact.affine_rank([exact.point(p) for p in [(0, 0), (1, 1), (2, 2)]]) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=3, max_size=3), min_size=2, max_size=5),
       st.lists(st.integers(0, 8), min_size=5, max_size=5),
       st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_exact_lp_agrees_with_highs(a, b, c):
    """Bounded feasible region (box plus random cuts); optimal values agree."""
    a = a + [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    b = b[:len(a) - 3] + [5, 5, 5]
    res = exact.lp_max(c, a, b)
    ref = linprog(-np.array(c, float), A_ub=np.array(a, float), b_ub=np.array(b, float), bounds=[(0, None)] * 3,
                  method="highs")
    assert res.status == "optimal" and ref.status == 0
    assert float(res.value) == pytest.approx(-ref.fun, abs=1e-7)
    assert all(exact.dot(r, res.x) <= bi for r, bi in zip(a, b))


def test_lp_infeasible_and_unbounded():
    assert exact.lp_max([1], [[1], [-1]], [1, -2]).status == "infeasible"
    assert exact.lp_max([1], [[-1]], [0]).status == "unbounded"
    r = exact.lp_max_free([1, 1], [[1, 0], [0, 1]], [2, 3], free=[0, 1])
    assert r.status == "optimal" and r.value == 5
