"""File formats: complexes, flip sequences, heights, certificates, polytopal complexes, OFF.

Everything is JSON with rationals written as "p/q" strings, keys sorted, so
equal objects serialize to identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from . import exact
from .charts import PolyCell, PolytopalComplex, SphericalComplex
from .complex import ComplexError, GeometricComplex, ManifoldComplex, SimplicialComplex, as_simplex
from .moves import BISTELLAR, STELLAR_SUBDIVIDE, STELLAR_WELD, FlipSequence, Move
from .regularity import RegularityCertificate


class FormatError(ComplexError):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _write(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def _read(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError("%s: not valid JSON (%s)" % (path, e)) from e


def _pt(p) -> list:
    return exact.fmt_point(p)


def _vertices(coords) -> dict:
    return {str(v): _pt(p) for v, p in sorted(coords.items())}


def _parse_vertices(d) -> dict:
    return {int(v): exact.parse_point(p) for v, p in d.items()}


def _simplexes(ss) -> list:
    return [list(s) for s in sorted(as_simplex(x) for x in ss)]


# ---------------------------------------------------------------------------
# complexes


def complex_to_dict(g, L=None) -> dict:
    if isinstance(g, SphericalComplex):
        d = {"model": "sphere", "dim": len(next(iter(g.coords.values()))),
             "vertices": _vertices(g.coords), "maximal_simplexes": _simplexes(g.complex.maximal)}
    else:
        d = {"model": g.model, "dim": g.ambient_dim, "vertices": _vertices(g.coords),
             "maximal_simplexes": _simplexes(g.complex.maximal)}
    if isinstance(g, ManifoldComplex):
        d["periods"] = [exact.fmt(p) for p in g.periods]
        d["lifts"] = [{"simplex": list(s), "coords": [_pt(p) for p in g.lifts[s]]}
                      for s in sorted(g.complex.maximal)]
        d["gluings"] = [{"facet_pair": [list(s), list(t)], "translation": _pt(tr)}
                        for (s, t), tr in sorted(g.gluings().items())]
    if L is not None:
        d["subcomplex_L"] = _simplexes(L)
    return d


def complex_from_dict(d: dict):
    """Returns ``(complex, L or None)``."""
    try:
        coords = _parse_vertices(d["vertices"])
        cx = SimplicialComplex(d["maximal_simplexes"])
        model = d.get("model", "euclidean")
        if model == "sphere":
            g = SphericalComplex(cx, coords)
        elif "periods" in d:
            lifts = {as_simplex(x["simplex"]): [exact.parse_point(p) for p in x["coords"]] for x in d["lifts"]}
            g = ManifoldComplex(cx, coords, lifts, [exact.q(p) for p in d["periods"]], int(d["dim"]))
            if "gluings" in d:
                want = {(as_simplex(x["facet_pair"][0]), as_simplex(x["facet_pair"][1])): exact.parse_point(x["translation"])
                        for x in d["gluings"]}
                if want != g.gluings():
                    raise FormatError("gluings table disagrees with the lifts")
        else:
            g = GeometricComplex(cx, coords, model, int(d["dim"]))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ComplexError):
            raise
        raise FormatError("malformed complex: %s" % e) from e
    L = d.get("subcomplex_L")
    return g, ([as_simplex(s) for s in L] if L is not None else None)


def write_complex(path, g, L=None) -> None:
    _write(path, complex_to_dict(g, L))


def read_complex(path):
    return complex_from_dict(_read(path))


# ---------------------------------------------------------------------------
# sequences


def move_to_dict(m: Move) -> dict:
    d = {"kind": m.kind, "A": list(m.A)}
    if m.B is not None:
        d["B"] = list(m.B)
    if m.vertex is not None:
        created = m.kind == STELLAR_SUBDIVIDE or (m.kind == BISTELLAR and m.B is not None and len(m.B) == 1)
        d["new_vertex" if created else "removed_vertex"] = {"id": m.vertex, "coords": _pt(m.point)}
    return d


def move_from_dict(d: dict) -> Move:
    kind = d["kind"]
    if kind not in (BISTELLAR, STELLAR_SUBDIVIDE, STELLAR_WELD):
        raise FormatError("unknown move kind %r" % (kind,))
    v = d.get("new_vertex") or d.get("removed_vertex")
    return Move(kind, as_simplex(d["A"]), as_simplex(d["B"]) if "B" in d else None,
                int(v["id"]) if v else None, exact.parse_point(v["coords"]) if v else None)


def sequence_to_dict(seq: FlipSequence, s: Optional[int] = None) -> dict:
    d = {"format": "flip-sequence", "start_fingerprint": seq.start_fingerprint,
         "end_fingerprint": seq.end_fingerprint, "moves": [move_to_dict(m) for m in seq.moves],
         "fixed_subcomplex": _simplexes(seq.fixed_subcomplex) if seq.fixed_subcomplex is not None else None,
         "start_vertices": _vertices(seq.start_vertices) if seq.start_vertices is not None else None}
    if s is not None:
        d["s"] = s
    return d


def sequence_from_dict(d: dict) -> tuple[FlipSequence, Optional[int]]:
    try:
        fixed = d.get("fixed_subcomplex")
        sv = d.get("start_vertices")
        seq = FlipSequence([move_from_dict(m) for m in d["moves"]], d["start_fingerprint"], d["end_fingerprint"],
                           frozenset(as_simplex(s) for s in fixed) if fixed is not None else None,
                           _parse_vertices(sv) if sv is not None else None)
    except (KeyError, TypeError) as e:
        raise FormatError("malformed sequence: %s" % e) from e
    return seq, d.get("s")


def write_sequence(path, seq: FlipSequence, s: Optional[int] = None) -> None:
    _write(path, sequence_to_dict(seq, s))


def read_sequence(path):
    return sequence_from_dict(_read(path))


# ---------------------------------------------------------------------------
# heights and certificates


def heights_to_dict(h) -> dict:
    return {str(v): exact.fmt(x) for v, x in sorted(h.items())}


def heights_from_dict(d) -> dict:
    return {int(v): exact.q(x) for v, x in d.items()}


def certificate_to_dict(c: RegularityCertificate) -> dict:
    return {"fingerprint": c.fingerprint, "s": c.s, "heights": heights_to_dict(c.heights)}


def certificate_from_dict(d) -> RegularityCertificate:
    return RegularityCertificate(d["fingerprint"], heights_from_dict(d["heights"]), int(d["s"]))


# ---------------------------------------------------------------------------
# polytopal complexes


def polytopal_to_dict(pc: PolytopalComplex) -> dict:
    d = {"model": pc.model, "dim": pc.ambient_dim, "vertices": _vertices(pc.coords), "cells": []}
    if pc.periods is not None:
        d["periods"] = [exact.fmt(p) for p in pc.periods]
    for c in pc.cells:
        d["cells"].append({
            "vertices": list(c.vertices), "points": [_pt(p) for p in c.points],
            "parents": [list(c.parents[0]), list(c.parents[1])],
            "faces": sorted([sorted(f), k] for f, k in c.faces.items()),
        })
    return d


def polytopal_from_dict(d) -> PolytopalComplex:
    cells = []
    for c in d["cells"]:
        faces = {frozenset(f): int(k) for f, k in c["faces"]}
        cells.append(PolyCell(tuple(c["vertices"]), tuple(exact.parse_point(p) for p in c["points"]),
                              (as_simplex(c["parents"][0]), as_simplex(c["parents"][1])), faces))
    periods = tuple(exact.q(p) for p in d["periods"]) if "periods" in d else None
    return PolytopalComplex(d["model"], int(d["dim"]), _parse_vertices(d["vertices"]), cells, periods)


# ---------------------------------------------------------------------------
# OFF export


def _dec(x) -> str:
    return repr(float(x))


def surface_off(g) -> str:
    """OFF mesh of the boundary of a 3-complex, or of the triangles themselves for a 2-complex."""
    if isinstance(g, SphericalComplex):
        tris = [(s, [g.coords[v] for v in s]) for s in sorted(g.complex.maximal)]
    elif g.dim == 2:
        tris = list(g.top_frames())
    elif g.dim == 3:
        tris = []
        frames = dict(g.top_frames())
        for f, cof in sorted(g.complex.facet_cofaces().items()):
            if len(cof) == 1:
                fr = dict(zip(cof[0], frames[cof[0]]))
                tris.append((f, [fr[v] for v in f]))
    else:
        raise FormatError("OFF export needs a 2- or 3-dimensional complex")
    index: dict = {}
    verts: list = []
    faces = []
    for _, pts in tris:
        row = []
        for p in pts:
            p = tuple(p) + (exact.ZERO,) * (3 - len(p))
            if p not in index:
                index[p] = len(verts)
                verts.append(p)
            row.append(index[p])
        faces.append(row)
    lines = ["OFF", "%d %d 0" % (len(verts), len(faces))]
    lines += [" ".join(_dec(x) for x in p) for p in verts]
    lines += ["3 " + " ".join(map(str, f)) for f in faces]
    return "\n".join(lines) + "\n"
