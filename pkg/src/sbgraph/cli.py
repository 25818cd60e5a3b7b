"""``sbg`` command-line driver.

Exit codes: 0 success, 1 parse error, 2 validation error (including a map
that breaks the fixed-point preconditions), 3 piece ceiling exceeded,
4 unbound parameter, 5 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings
from pathlib import Path

from .dsl.codegen import generate_equations, render_equations
from .dsl.flatten import flatten_graph
from .dsl.parser import parse
from .errors import (
    MapInfPreconditionError,
    ParseError,
    PieceLimitError,
    UnboundParameterError,
    ValidationError,
)
from .graph import SBGraph, check_valid, connect_comp, validate
from .graphfile import parse_graph, print_graph, to_json
from .oracle import check_against_oracle
from .pwlmap import PWLMap

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID = 2
EXIT_PIECES = 3
EXIT_UNBOUND = 4
EXIT_MISMATCH = 5


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise _Fail(EXIT_PARSE, f"{path}: {err.strerror}") from None


def _params(items: list[str]) -> dict[str, int]:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        try:
            if not sep:
                raise ValueError
            out[name.strip()] = int(value)
        except ValueError:
            raise _Fail(EXIT_PARSE, f"bad parameter {item!r}, expected NAME=INTEGER") from None
    return out


def _map_json(rmap: PWLMap) -> list[dict]:
    def enc(x):
        return x.numerator if x.denominator == 1 else str(x)

    return [
        {"domain": str(b), "gain": [enc(g) for g in fn.gain], "offset": [enc(o) for o in fn.offset]}
        for b, fn in rmap.atoms()
    ]


def _solve(g: SBGraph):
    check_valid(g)
    return connect_comp(g)


def _check(g: SBGraph, rmap: PWLMap, limit: int | None) -> None:
    if limit is None:
        return
    total = sum(v.vset.cardinality() for v in g.vertices)
    if total > limit:
        print(f"check skipped: graph expands to {total} vertices, limit is {limit}", file=sys.stderr)
        return
    report = check_against_oracle(g, rmap, limit)
    print(report.render())
    if not report.ok:
        raise _Fail(EXIT_MISMATCH, "representative map disagrees with the oracle")


def cmd_validate(args) -> int:
    g = parse_graph(_read(args.graph))
    problems = validate(g)
    for p in problems:
        print(p)
    if problems:
        return EXIT_INVALID
    print("valid")
    return EXIT_OK


def cmd_connect(args) -> int:
    g = parse_graph(_read(args.graph))
    rmap, stats = _solve(g)
    if args.json:
        doc = {"rmap": _map_json(rmap)}
        if args.stats:
            doc["stats"] = {"iterations": stats.iterations, "passes": stats.passes, "pieces": stats.pieces}
        print(json.dumps(doc, indent=2))
    else:
        if rmap.pieces:
            print(rmap.render())
        if args.stats:
            print(stats.summary())
    _check(g, rmap, args.check)
    return EXIT_OK


def cmd_flatten(args) -> int:
    model = parse(_read(args.model))
    g, _ = flatten_graph(model, _params(args.param))
    if args.emit_graph:
        print(to_json(g) if args.json else print_graph(g), end="")
    rmap, stats = _solve(g)
    if args.emit_map:
        print(rmap.render())
    if not (args.emit_graph or args.emit_map):
        print(render_equations(generate_equations(rmap)))
    if args.stats:
        print(stats.summary())
    _check(g, rmap, args.check)
    return EXIT_OK


def _sweep(specs: list[str]) -> list[dict[str, int]]:
    columns = []
    for spec in specs:
        name, sep, values = spec.partition("=")
        try:
            if not sep:
                raise ValueError
            columns.append((name.strip(), [int(v) for v in values.split(",")]))
        except ValueError:
            raise _Fail(EXIT_PARSE, f"bad sweep {spec!r}, expected NAME=V1,V2,...") from None
    lengths = {len(vals) for _, vals in columns}
    if len(lengths) > 1:
        raise _Fail(EXIT_PARSE, "all sweeps must list the same number of values")
    rows = lengths.pop() if lengths else 0
    return [{name: vals[r] for name, vals in columns} for r in range(rows)]


def cmd_bench(args) -> int:
    model = parse(_read(args.model))
    fixed = _params(args.param)
    print(f"{'params':<24} {'iterations':>10} {'pieces':>7} {'seconds':>9}")
    for row in _sweep(args.param_sweep):
        params = {**fixed, **row}
        best = None
        for _ in range(max(1, args.repeat)):
            t0 = time.perf_counter()
            g, _ = flatten_graph(model, params)
            _, stats = _solve(g)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        label = ",".join(f"{k}={v}" for k, v in row.items())
        print(f"{label:<24} {stats.iterations:>10} {stats.final_pieces:>7} {best:>9.4f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sbg", description="Connected components of set-based graphs.")
    p.add_argument("-v", "--verbose", action="store_true", help="log every algorithm pass")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a graph file against the structural rules")
    v.add_argument("graph")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("connect", help="print the representative map of a graph file")
    c.add_argument("graph")
    c.add_argument("--stats", action="store_true", help="print iteration and piece counts")
    c.add_argument("--check", type=int, metavar="N", help="compare with union-find when the graph has at most N vertices")
    c.add_argument("--json", action="store_true", help="machine-readable output")
    c.set_defaults(func=cmd_connect)

    f = sub.add_parser("flatten", help="generate effort/flow equations from a connection model")
    f.add_argument("model")
    f.add_argument("--param", action="append", metavar="NAME=VALUE", help="bind a model parameter")
    f.add_argument("--emit-graph", action="store_true", help="print the graph file instead of equations")
    f.add_argument("--emit-map", action="store_true", help="print the representative map instead of equations")
    f.add_argument("--json", action="store_true", help="write --emit-graph output as JSON")
    f.add_argument("--stats", action="store_true")
    f.add_argument("--check", type=int, metavar="N")
    f.set_defaults(func=cmd_flatten)

    b = sub.add_parser("bench", help="time the component search over parameter values")
    b.add_argument("model")
    b.add_argument("--param-sweep", action="append", required=True, metavar="NAME=V1,V2,...")
    b.add_argument("--param", action="append", metavar="NAME=VALUE")
    b.add_argument("--repeat", type=int, default=3, help="report the fastest of this many runs")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    source = getattr(args, "graph", None) or getattr(args, "model", "")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, *a, **k: print(f"{source}:{msg}", file=sys.stderr)
            return args.func(args)
    except _Fail as err:
        print(f"error: {err}", file=sys.stderr)
        return err.code
    except ParseError as err:
        print(f"{source}:{err}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as err:
        for v in err.violations:
            print(f"{source}: {v}", file=sys.stderr)
        return EXIT_INVALID
    except MapInfPreconditionError as err:
        print(f"{source}: fixed-point precondition failed: {err}", file=sys.stderr)
        return EXIT_INVALID
    except PieceLimitError as err:
        print(f"{source}: {err}", file=sys.stderr)
        return EXIT_PIECES
    except UnboundParameterError as err:
        print(f"{source}: {err}", file=sys.stderr)
        return EXIT_UNBOUND


if __name__ == "__main__":
    sys.exit(main())
