"""Command-line front end.

Exit codes: 0 success, 1 usage or I/O error, 2 validation failure,
3 hypothesis violation, 4 s_max exhaustion.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import exact, io
from .charts import ChartError
from .complex import ComplexError, VertexPool, as_simplex, fingerprint, validate_geometric
from .moves import (BISTELLAR, STELLAR_SUBDIVIDE, STELLAR_WELD, SequenceError, apply_sequence, derived_subdivision,
                    record)
from .pipeline import HypothesisError, connect_geometric
from .regularity import RegularizeExhausted
from .sweep import SweepError, format_log, star_connection

OK, USAGE, INVALID, HYPOTHESIS, EXHAUSTED = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, "%s: error: %s\n" % (self.prog, message))


def parse_simplexes(text: str) -> list:
    """``"0 1; 1 2"`` or ``"0,1;1,2"`` -> [(0, 1), (1, 2)]."""
    out = []
    for part in text.split(";"):
        part = part.replace(",", " ").split()
        if part:
            out.append(as_simplex(int(x) for x in part))
    return out


def parse_move(text: str) -> dict:
    """Tokens ``kind A=.. [B=..] [at=..] [v=..]``; kind is bistellar, subdivide or weld."""
    tokens = text.split()
    if not tokens:
        raise ValueError("empty move")
    kinds = {"bistellar": BISTELLAR, "subdivide": STELLAR_SUBDIVIDE, "weld": STELLAR_WELD}
    if tokens[0] not in kinds:
        raise ValueError("unknown move kind %r" % tokens[0])
    out = {"kind": kinds[tokens[0]], "A": None, "B": None, "a": None, "vertex": None}
    for tok in tokens[1:]:
        key, _, val = tok.partition("=")
        if key == "A":
            out["A"] = as_simplex(int(x) for x in val.split(","))
        elif key == "B":
            out["B"] = as_simplex(int(x) for x in val.split(","))
        elif key == "at":
            out["a"] = exact.point(val.split(","))
        elif key == "v":
            out["vertex"] = int(val)
        else:
            raise ValueError("unknown move field %r" % key)
    if out["A"] is None:
        raise ValueError("a move needs A=")
    return out


def _load(path):
    g, L = io.read_complex(path)
    return g, L


def _emit(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_validate(args) -> int:
    g, _ = _load(args.path)
    if not hasattr(g, "ambient_dim"):
        print("spherical complexes are validated per star chart")
        return OK
    rep = validate_geometric(g)
    for v in rep:
        print("%s %s %s" % (v.kind, " | ".join(" ".join(map(str, s)) for s in v.simplexes), v.detail or ""))
    print("valid" if rep.ok else "invalid: %d violation(s)" % len(rep))
    print("fingerprint %s" % fingerprint(g))
    return OK if rep.ok else INVALID


def cmd_subdivide(args) -> int:
    g, L = _load(args.path)
    rel = None
    if args.relative is not None:
        rel = L if args.relative == "file" else parse_simplexes(args.relative)
        if rel is None:
            raise HypothesisError("--relative given but the file has no subcomplex_L")
    pool = VertexPool()
    pool.register(g)
    for _ in range(args.times):
        g = derived_subdivision(g, rel, pool=pool)
    _emit(args.out, io.dumps(io.complex_to_dict(g, None)))
    return OK


def cmd_flip(args) -> int:
    g, L = _load(args.path)
    for spec in args.move:
        m = parse_move(spec)
        g, _ = record(g, m["kind"], m["A"], m["B"], m["a"], m["vertex"])
    _emit(args.out, io.dumps(io.complex_to_dict(g, L)))
    return OK


def cmd_connect(args) -> int:
    g1, L1 = _load(args.path1)
    g2, _ = _load(args.path2)
    if args.star:
        res = star_connection(g1, g2, s_max=args.s_max)
        if args.sweep_log:
            lines = ["# side 1"] + format_log(res.logs[0]) + ["# side 2"] + format_log(res.logs[1])
            Path(args.sweep_log).write_text("\n".join(lines) + "\n")
        s, seq, stats = res.s, res.sequence, {"moves": len(res.sequence), "counts": res.sequence.counts()}
    else:
        L = parse_simplexes(args.fixed) if args.fixed else (L1 or [])
        common = _load(args.common)[0] if args.common else None
        res = connect_geometric(g1, g2, L, s_max=args.s_max, common=common, verify=not args.no_verify)
        s, seq, stats = res.s, res.sequence, res.stats
    if args.out:
        io.write_sequence(args.out, seq, s)
    stats = dict(stats, s=s)
    print(json.dumps(stats, sort_keys=True, default=str))
    return OK


def cmd_verify(args) -> int:
    g, _ = _load(args.path)
    seq, s = io.read_sequence(args.seqpath)
    if fingerprint(g) != seq.start_fingerprint and s:
        pool = VertexPool()
        pool.register(g)
        for _ in range(s):
            g = derived_subdivision(g, pool=pool)
    try:
        out = apply_sequence(g, seq)
    except SequenceError as e:
        print("verification failed at step %d: %s" % (e.step, e))
        return INVALID
    print("verified %d moves; end fingerprint %s" % (len(seq), fingerprint(out)))
    return OK


def cmd_export(args) -> int:
    g, _ = _load(args.path)
    if args.format != "off":
        raise ValueError("unsupported format %r" % args.format)
    _emit(args.out, io.surface_off(g))
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="geoflip", description="Geometric bistellar flips between triangulations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("validate", help="check that a complex is a geometric triangulation")
    a.add_argument("path")
    a.set_defaults(func=cmd_validate)

    a = sub.add_parser("subdivide", help="derived subdivision")
    a.add_argument("path")
    a.add_argument("--times", type=int, default=1)
    a.add_argument("--relative", nargs="?", const="file", default=None,
                   help="keep L fixed: simplexes like '0 1;1 2', or the file's subcomplex_L when no value")
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_subdivide)

    a = sub.add_parser("flip", help="apply moves, e.g. --move 'bistellar A=0,2 B=1,3'")
    a.add_argument("path")
    a.add_argument("--move", action="append", required=True)
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_flip)

    a = sub.add_parser("connect", help="flip sequence between derived subdivisions of two triangulations")
    a.add_argument("path1")
    a.add_argument("path2")
    a.add_argument("--fixed", default=None, help="common subcomplex L, e.g. '0 1;1 2' (default: file's subcomplex_L)")
    a.add_argument("--s-max", type=int, default=3)
    a.add_argument("--out", default=None)
    a.add_argument("--common", default=None, help="user-supplied common subdivision")
    a.add_argument("--star", action="store_true", help="inputs triangulate one strictly star-convex polyhedron")
    a.add_argument("--sweep-log", default=None, help="with --star: write the peel log here")
    a.add_argument("--no-verify", action="store_true")
    a.set_defaults(func=cmd_connect)

    a = sub.add_parser("verify", help="replay a sequence with full geometric validation")
    a.add_argument("path")
    a.add_argument("seqpath")
    a.set_defaults(func=cmd_verify)

    a = sub.add_parser("export", help="boundary surface mesh")
    a.add_argument("path")
    a.add_argument("--format", default="off", choices=["off"])
    a.add_argument("--out", default=None)
    a.set_defaults(func=cmd_export)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except RegularizeExhausted as e:
        print("s_max exhausted: %s" % e, file=sys.stderr)
        return EXHAUSTED
    except (HypothesisError, SweepError, ChartError) as e:
        print("hypothesis violation: %s" % e, file=sys.stderr)
        return HYPOTHESIS
    except io.FormatError as e:
        print("bad input: %s" % e, file=sys.stderr)
        return USAGE
    except ComplexError as e:
        print("invalid: %s" % e, file=sys.stderr)
        return INVALID
    except (OSError, ValueError) as e:
        print("error: %s" % e, file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
