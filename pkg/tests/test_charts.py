import itertools

import pytest
from hypothesis import given, settings, strategies as st

from geoflip import exact
from geoflip.charts import (ChartError, PolyCell, PolytopalComplex, SphericalComplex, common_refinement, develop_star,
                            face_lattice, gnomonic_project, is_subdivision_of, klein_geodesic_check, normalize_chart,
                            simplex_intersection, triangulate_polytopal, unify_labels)
from geoflip.complex import SimplicialComplex, complexes_equal, validate_geometric
from geoflip.moves import derived_subdivision
from helpers import G, SQUARE, SQUARE_BOUNDARY, delaunay, frac, in_closed, orientation, rng, square, torus_grid

Q = exact.q


def test_gnomonic_examples():
    assert gnomonic_project((0, 0, -1)) == (0, 0, -1)
    assert gnomonic_project((Q(3) / 5, 0, -Q(4) / 5)) == (Q(3) / 4, 0, -1)
    with pytest.raises(ChartError):
        gnomonic_project((1, 0, 0))
    with pytest.raises(ChartError):
        gnomonic_project((Q(1) / 2, 0, -Q(1) / 2))


def test_klein_checks():
    assert klein_geodesic_check((Q(1) / 2, 0), (0, -Q(3) / 5))
    with pytest.raises(ChartError):
        klein_geodesic_check((Q(3) / 5, Q(4) / 5), (0, 0))
    with pytest.raises(ChartError):
        klein_geodesic_check((0, 0), (1, 1))


def test_torus_vertex_star_develops_to_a_hexagon():
    t = torus_grid(3)
    g = develop_star(t, (0,))
    assert len(g.complex.maximal) == 6
    assert validate_geometric(g).ok
    # by hand: with NE diagonals the six neighbours of a grid vertex sit at
    # these offsets, in units of the grid spacing
    third = Q(1) / 3
    o = g.coords[0]
    offsets = {tuple((x - y) / third for x, y in zip(p, o)) for v, p in g.coords.items() if v != 0}
    assert offsets == {(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)}


def test_development_does_not_depend_on_the_seed():
    t = torus_grid(3)
    for a in [(0,), (0, 1), (0, 4)]:
        ref = normalize_chart(develop_star(t, a))
        for anchor in a:
            assert complexes_equal(normalize_chart(develop_star(t, a, anchor)), ref)


def test_embedded_star_is_restricted_in_place():
    g = derived_subdivision(square())
    centre = next(v for v, p in g.coords.items() if p == (Q(1) / 2, Q(1) / 2))
    st_ = develop_star(g, (centre,))
    assert all(st_.coords[v] == g.coords[v] for v in st_.vertices)
    assert len(st_.complex.maximal) == len(g.complex.containing((centre,)))


def test_spherical_star_develops():
    p = (Q(2) / 3, Q(2) / 3, Q(1) / 3)
    m = SphericalComplex(SimplicialComplex([(0, 1, 3), (1, 2, 3), (0, 2, 3)]), {0: (1, 0, 0), 1: (0, 1, 0), 2: (0, 0, 1), 3: p})
    g = develop_star(m, (3,))
    assert g.model == "sphere-gnomonic" and g.ambient_dim == 2
    assert validate_geometric(g).ok


def test_spherical_star_beyond_a_hemisphere_fails():
    e = {0: (1, 0, 0), 1: (-1, 0, 0), 2: (0, 1, 0), 3: (0, -1, 0), 4: (0, 0, 1), 5: (0, 0, -1)}
    tops = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    octahedron = SphericalComplex(SimplicialComplex(tops), e)
    with pytest.raises(ChartError):
        develop_star(octahedron, (4,))


def test_intersection_examples():
    tri = [(0, 0), (1, 0), (0, 1)]
    assert simplex_intersection(tri, tri) == sorted(exact.point(p) for p in tri)
    other = [(1, 0), (0, 1), (1, 1)]
    assert simplex_intersection(tri, other) == [(0, 1), (1, 0)]
    # triangles 012 and 013 of the unit square overlap in the triangle below
    # both diagonals: x + y <= 1 and y <= x
    t012 = [SQUARE[i] for i in (0, 1, 2)]
    t013 = [SQUARE[i] for i in (0, 1, 3)]
    assert simplex_intersection(t012, t013) == [(0, 0), (Q(1) / 2, Q(1) / 2), (1, 0)]
    assert simplex_intersection(tri, [(5, 5), (6, 5), (5, 6)]) == []


def _segment_crossings(s, t):
    out = []
    for a, b in itertools.combinations(s, 2):
        for c, d in itertools.combinations(t, 2):
            den = (frac(b[0]) - frac(a[0])) * (frac(d[1]) - frac(c[1])) - \
                  (frac(b[1]) - frac(a[1])) * (frac(d[0]) - frac(c[0]))
            if den == 0:
                continue
            u = ((frac(c[0]) - frac(a[0])) * (frac(d[1]) - frac(c[1])) -
                 (frac(c[1]) - frac(a[1])) * (frac(d[0]) - frac(c[0]))) / den
            w = ((frac(c[0]) - frac(a[0])) * (frac(b[1]) - frac(a[1])) -
                 (frac(c[1]) - frac(a[1])) * (frac(b[0]) - frac(a[0]))) / den
            if 0 <= u <= 1 and 0 <= w <= 1:
                out.append((frac(a[0]) + u * (frac(b[0]) - frac(a[0])), frac(a[1]) + u * (frac(b[1]) - frac(a[1]))))
    return out


def intersection_oracle(s, t):
    """Corners of one triangle inside the other plus edge crossings, reduced to hull vertices."""
    cand = {tuple(map(frac, p)) for p in s if in_closed(p, t)}
    cand |= {tuple(map(frac, p)) for p in t if in_closed(p, s)}
    cand |= set(_segment_crossings(s, t))
    hull = set()
    for p in cand:
        others = [q for q in cand if q != p]
        # p is a vertex unless it is a convex combination of two others
        inner = any(orientation([a, b, p]) == 0 and min(a, b) < p < max(a, b)
                    for a, b in itertools.combinations(others, 2))
        inner = inner or any(in_closed(p, list(c)) and orientation(list(c)) != 0
                             and p not in c and not any(orientation([c[i], c[j], p]) == 0
                                                        for i, j in ((0, 1), (1, 2), (0, 2)))
                             for c in itertools.combinations(others, 3))
        if not inner:
            hull.add(p)
    return sorted(hull)


tri_pts = st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=3, max_size=3, unique=True)


@settings(max_examples=60, deadline=None)
@given(tri_pts, tri_pts)
def test_intersection_matches_brute_force(s, t):
    if orientation(s) == 0 or orientation(t) == 0:
        return
    got = [tuple(map(frac, p)) for p in simplex_intersection(s, t)]
    assert got == intersection_oracle(s, t)


def test_overlay_of_equal_complexes():
    pc = common_refinement(square(), square())
    assert sorted(c.vertices for c in pc.cells) == [(0, 1, 2), (0, 2, 3)]
    assert pc.is_simplicial()


def test_overlay_of_the_two_diagonals():
    pc = common_refinement(square("02"), square("13"))
    assert len(pc.cells) == 4
    assert all(len(c.vertices) == 3 for c in pc.cells)
    assert pc.volume() == 1
    centre = (Q(1) / 2, Q(1) / 2)
    assert all(centre in c.points for c in pc.cells)


def test_overlay_with_a_refinement():
    g1 = square()
    g2 = derived_subdivision(g1)
    a, b, _ = unify_labels(g1, g2)
    pc = common_refinement(a, b)
    assert sorted(c.vertices for c in pc.cells) == sorted(b.complex.maximal)


def _overlay_checks(g1, g2, pc):
    assert pc.volume() == g1.volume() == g2.volume()
    for c in pc.cells:
        for side, g in ((0, g1), (1, g2)):
            assert all(in_closed(p, list(g.points(c.parents[side]))) for p in c.points)
            x = tuple(sum(frac(p[i]) for p in c.points) / len(c.points) for i in range(g.ambient_dim))
            assert sum(in_closed(x, list(pts)) for _, pts in g.top_frames()) == 1


def _square_cell():
    pts = [exact.point(p) for p in SQUARE]
    hs = [([-1, 0], 0), ([1, 0], 1), ([0, -1], 0), ([0, 1], 1)]
    lat = face_lattice(pts, [([exact.q(x) for x in a], exact.q(b)) for a, b in hs])
    faces = {frozenset(f): d for f, d in lat.items()}
    cell = PolyCell((0, 1, 2, 3), tuple(pts), ((0, 1, 2), (0, 1, 2)), faces)
    return PolytopalComplex("euclidean", 2, dict(enumerate(pts)), [cell])


def test_triangulate_square_cell():
    pc = _square_cell()
    # relative to the empty complex every edge is subdivided as well
    full = triangulate_polytopal(pc, [])
    assert len(full.complex.maximal) == 8
    assert validate_geometric(full).ok and full.volume() == 1
    # keeping the boundary edges, the cell is coned straight over them
    kept = triangulate_polytopal(pc, SQUARE_BOUNDARY)
    assert len(kept.complex.maximal) == 4
    assert kept.coords[max(kept.vertices)] == (Q(1) / 2, Q(1) / 2)


def test_triangulate_simplicial_cells_in_l_is_identity():
    g = square()
    pc = common_refinement(g, g)
    out = triangulate_polytopal(pc, sorted(g.complex.maximal))
    assert complexes_equal(out, g)


def test_triangulate_the_overlay():
    g1, g2 = square("02"), square("13")
    pc = common_refinement(g1, g2)
    _overlay_checks(g1, g2, pc)
    k = triangulate_polytopal(pc, SQUARE_BOUNDARY)
    assert validate_geometric(k).ok
    assert is_subdivision_of(k, g1) and is_subdivision_of(k, g2)
    for g in (g1, g2):
        for s, pts in k.top_frames():
            assert any(all(in_closed(p, list(tp)) for p in pts) for _, tp in g.top_frames())
    assert not is_subdivision_of(g1, k)


HULL = [(0, 0), (61, 3), (57, 59), (2, 55)]


def _inside(p):
    return all(orientation([HULL[i], HULL[(i + 1) % 4], p]) > 0 for i in range(4))


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_overlay_of_random_triangulations(seed):
    r = rng(seed)
    sides = []
    for _ in range(2):
        pts = list(HULL)
        while len(pts) < 4 + r.randint(1, 3):
            p = (r.randint(5, 55), r.randint(5, 55))
            if _inside(p) and p not in pts:
                pts.append(p)
        sides.append(delaunay(pts))
    g1, g2, pool = unify_labels(*sides)
    pc = common_refinement(g1, g2, pool)
    _overlay_checks(g1, g2, pc)
    k = triangulate_polytopal(pc, [(0, 1), (1, 2), (2, 3), (0, 3)], pool)
    assert validate_geometric(k).ok
    assert is_subdivision_of(k, g1) and is_subdivision_of(k, g2)


def test_overlay_rejects_different_supports():
    other = G([(0, 1, 2), (0, 2, 3)], [(0, 0), (1, 0), (1, 1), (0, 2)])
    a, b, _ = unify_labels(square(), other)
    with pytest.raises(ChartError):
        common_refinement(a, b)


def test_torus_overlay_covers_both():
    t1, t2 = torus_grid(3, True), torus_grid(3, False)
    pc = common_refinement(t1, t2)
    assert pc.volume() == 1
    assert len(pc.cells) == 36
    k = triangulate_polytopal(pc, [])
    assert validate_geometric(k).ok
    assert is_subdivision_of(k, t1) and is_subdivision_of(k, t2)
