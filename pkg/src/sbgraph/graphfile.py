"""Line-oriented text format for set-based graphs, with a JSON mirror.

::

    # comment
    dim 1
    vertex S.p {[1:1:1]}
    vertex R.p {[1001:1:2000]}
    edge E1 S.p R.p
      piece [1:1:1] map1 gain=0 offset=1 map2 gain=0 offset=1001

Multi-dimensional gains and offsets are comma-separated (``gain=1,0``);
rational values are written ``1/2``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from . import interval as iv
from .errors import ParseError
from .graph import SBGraph, SetEdge, SetVertex
from .pwlmap import AffinePiece, PWLMap
from .sets import parse_set


def _num(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _fn_text(fn: AffinePiece) -> str:
    return f"gain={','.join(_num(g) for g in fn.gain)} offset={','.join(_num(o) for o in fn.offset)}"


def _common_pieces(e: SetEdge):
    for b1, f1 in e.map1.atoms():
        for b2, f2 in e.map2.atoms():
            c = iv.intersect(b1, b2)
            if c is not None:
                yield c, f1, f2


def print_graph(g: SBGraph) -> str:
    lines = [f"dim {g.dim}"]
    for v in g.vertices:
        lines.append(f"vertex {v.name} {v.vset}")
    for e in g.edges:
        lines.append(f"edge {e.name} {g.vertices[e.index1].name} {g.vertices[e.index2].name}")
        for box, f1, f2 in sorted(_common_pieces(e), key=lambda p: p[0].start):
            lines.append(f"  piece {box} map1 {_fn_text(f1)} map2 {_fn_text(f2)}")
    return "\n".join(lines) + "\n"


_PIECE = re.compile(
    r"piece\s+(?P<box>\S+)\s+map1\s+gain=(?P<g1>\S+)\s+offset=(?P<o1>\S+)"
    r"\s+map2\s+gain=(?P<g2>\S+)\s+offset=(?P<o2>\S+)"
)


def _vector(text: str, line: int) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"bad number list {text!r}", line, 1) from None


def _assemble(dim, vertices, edges) -> SBGraph:
    """``edges`` holds ``(name, left, right, [(box, f1, f2)], line)``."""
    names = [v.name for v in vertices]
    if len(set(names)) != len(names):
        raise ParseError("duplicate vertex name", 1, 1)
    out = []
    for name, left, right, pieces, line in edges:
        for end in (left, right):
            if end not in names:
                raise ParseError(f"edge {name} refers to unknown vertex {end!r}", line, 1)
        try:
            m1 = PWLMap.from_pieces(dim, [(b, f1) for b, f1, _ in pieces])
            m2 = PWLMap.from_pieces(dim, [(b, f2) for b, _, f2 in pieces])
        except ValueError as err:
            raise ParseError(f"edge {name}: {err}", line, 1) from None
        out.append(SetEdge(name, names.index(left), names.index(right), m1, m2))
    return SBGraph(tuple(vertices), tuple(out), dim)


def parse_graph(text: str) -> SBGraph:
    if text.lstrip().startswith("{"):
        return from_json(text)
    dim = 1
    vertices: list[SetVertex] = []
    edges: list = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        word, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if word == "dim":
                if vertices or edges:
                    raise ParseError("'dim' must come first", n, 1)
                dim = int(rest)
                if dim < 1:
                    raise ParseError(f"dimension must be positive, got {dim}", n, 1)
            elif word == "vertex":
                name, _, lit = rest.partition(" ")
                vertices.append(SetVertex(name, parse_set(lit, dim)))
            elif word == "edge":
                parts = rest.split()
                if len(parts) != 3:
                    raise ParseError("expected 'edge NAME FROM TO'", n, 1)
                edges.append((parts[0], parts[1], parts[2], [], n))
            elif word == "piece":
                if not edges:
                    raise ParseError("'piece' outside an edge", n, 1)
                m = _PIECE.fullmatch(line)
                if not m:
                    raise ParseError("expected 'piece BOX map1 gain=.. offset=.. map2 gain=.. offset=..'", n, 1)
                box = iv.parse_interval(m["box"])
                f1 = AffinePiece(_vector(m["g1"], n), _vector(m["o1"], n))
                f2 = AffinePiece(_vector(m["g2"], n), _vector(m["o2"], n))
                edges[-1][3].append((box, f1, f2))
            else:
                raise ParseError(f"unknown directive {word!r}", n, 1)
        except ParseError:
            raise
        except ValueError as err:
            raise ParseError(str(err), n, 1) from None
    for name, _, _, pieces, line in edges:
        if not pieces:
            raise ParseError(f"edge {name} has no pieces", line, 1)
    return _assemble(dim, vertices, edges)


def _fn_json(fn: AffinePiece) -> dict:
    def enc(x: Fraction):
        return x.numerator if x.denominator == 1 else _num(x)

    return {"gain": [enc(g) for g in fn.gain], "offset": [enc(o) for o in fn.offset]}


def to_json(g: SBGraph) -> str:
    doc = {
        "dim": g.dim,
        "vertices": [{"name": v.name, "set": str(v.vset)} for v in g.vertices],
        "edges": [
            {
                "name": e.name,
                "from": g.vertices[e.index1].name,
                "to": g.vertices[e.index2].name,
                "pieces": [
                    {"domain": str(b), "map1": _fn_json(f1), "map2": _fn_json(f2)}
                    for b, f1, f2 in sorted(_common_pieces(e), key=lambda p: p[0].start)
                ],
            }
            for e in g.edges
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def from_json(text: str) -> SBGraph:
    try:
        doc = json.loads(text)
        dim = int(doc.get("dim", 1))
        vertices = [SetVertex(v["name"], parse_set(v["set"], dim)) for v in doc.get("vertices", [])]
        edges = []
        for e in doc.get("edges", []):
            pieces = []
            for p in e["pieces"]:
                f1 = AffinePiece(tuple(Fraction(x) for x in p["map1"]["gain"]),
                                 tuple(Fraction(x) for x in p["map1"]["offset"]))
                f2 = AffinePiece(tuple(Fraction(x) for x in p["map2"]["gain"]),
                                 tuple(Fraction(x) for x in p["map2"]["offset"]))
                pieces.append((iv.parse_interval(p["domain"]), f1, f2))
            edges.append((e["name"], e["from"], e["to"], pieces, 1))
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, err.lineno, err.colno) from None
    except (KeyError, TypeError, ValueError) as err:
        raise ParseError(f"bad graph document: {err}", 1, 1) from None
    return _assemble(dim, vertices, edges)
