"""Number connectors into set-vertices and turn connect statements into set-edges."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ..graph import SBGraph, SetEdge, SetVertex
from ..interval import MDInterval, Point
from ..pwlmap import AffinePiece, _build
from ..sets import IntervalSet
from .syntax import Connect, ConnectModel, Linear, LoopIter, Ref, located


@dataclass(frozen=True)
class ConnectorSlot:
    """Where one connector lives: ``base[j] + index`` per dimension."""

    name: str
    extents: tuple[int, ...]
    base: tuple[int, ...]
    vset: IntervalSet

    def point(self, index: tuple[int, ...]) -> Point:
        idx = tuple(index) + (1,) * (len(self.base) - len(index))
        return tuple(b + i for b, i in zip(self.base, idx))


@dataclass(frozen=True)
class VertexNumbering:
    dim: int
    blocks: tuple[int, ...]
    slots: tuple[ConnectorSlot, ...]

    def slot(self, name: str) -> ConnectorSlot:
        for s in self.slots:
            if s.name == name:
                return s
        raise KeyError(name)

    def name_of(self, p: Point) -> str:
        """Source-level name of a vertex, e.g. ``R[3].p`` or ``Cell[2,5].l``."""
        for s in self.slots:
            if s.vset.contains(p):
                if not s.extents:
                    return s.name
                idx = ",".join(str(x - b) for x, b in zip(p[:len(s.extents)], s.base))
                comp, _, port = s.name.rpartition(".")
                return f"{comp}[{idx}].{port}" if comp else f"{port}[{idx}]"
        raise KeyError(p)


def _power_of_ten_at_least(n: int) -> int:
    b = 1
    while b < n:
        b *= 10
    return b


def _component_decls(model: ConnectModel) -> set[str]:
    """Declarations such as ``R[N];`` that size every ``R.*`` connector."""
    used = {r.connector for c, _ in model.connects() for r in (c.left, c.right)}
    return {d.name for d in model.decls if "." not in d.name and d.name not in used
            and any(u.startswith(d.name + ".") for u in used)}


def _int(x: Fraction, what: str, pos) -> int:
    if x.denominator != 1:
        raise located(f"{what} {x} is not an integer", pos)
    return x.numerator


def _ranges(scope: tuple[LoopIter, ...], params) -> dict[str, tuple[int, int]]:
    return {it.name: (_int(it.lo.value(params), "loop bound", it.pos), _int(it.hi.value(params), "loop bound", it.pos))
            for it in scope}


def _index_span(e: Linear, ranges: dict[str, tuple[int, int]]) -> tuple[Fraction, Fraction]:
    lo = hi = e.const
    for n, c in e.terms:
        a, b = ranges[n]
        lo += c * a
        hi += c * b
    return lo, hi


def number_vertices(model: ConnectModel, params: Mapping[str, int]) -> VertexNumbering:
    components = _component_decls(model)
    decls = {d.name: d for d in model.decls}
    names = [n for n in model.connectors if n not in components]
    extents: dict[str, list[int] | None] = {}
    for n in names:
        d = decls.get(n) or decls.get(n.rpartition(".")[0] if "." in n else "")
        if d is None:
            extents[n] = None
            continue
        ext = []
        for e in d.extents:
            v = _int(e.value(params), "extent", d.pos)
            if v <= 0:
                raise located(f"connector {n} has extent {v}", d.pos)
            ext.append(v)
        extents[n] = ext
    inferred: dict[str, list[int]] = {}
    for c, scope in model.connects():
        ranges = _ranges(scope, params)
        if any(a > b for a, b in ranges.values()):
            continue
        for r in (c.left, c.right):
            exprs = [e.substitute(params, keep=frozenset(ranges)) for e in r.indices]
            known = extents.get(r.connector)
            arity = len(known) if known is not None else len(inferred.get(r.connector, exprs))
            if len(exprs) != arity:
                raise located(f"{r.connector} used with {len(exprs)} indices, expected {arity}", r.pos)
            cur = inferred.setdefault(r.connector, [0] * len(exprs))
            for j, e in enumerate(exprs):
                lo, hi = _index_span(e, ranges)
                if lo < 1:
                    raise located(f"index {r.indices[j]} of {r.connector} reaches {lo}, below 1", r.pos)
                if known is not None and hi > known[j]:
                    raise located(f"index {r.indices[j]} of {r.connector} reaches {hi}, beyond extent {known[j]}", r.pos)
                cur[j] = max(cur[j], int(hi))
    final = {n: tuple(extents[n] if extents[n] is not None else inferred.get(n, [])) for n in names}
    scalars = [n for n in names if not final[n]]
    arrays = [n for n in names if final[n]]
    dim = max([len(final[n]) for n in arrays], default=1)
    blocks = tuple(
        _power_of_ten_at_least(max([final[n][j] for n in arrays if len(final[n]) > j] + [len(scalars), 1]))
        for j in range(dim)
    )
    slots = []
    for k, n in enumerate(scalars, start=1):
        p = MDInterval.point((k,) * dim)
        slots.append(ConnectorSlot(n, (), (k - 1,) * dim, IntervalSet(dim, (p,))))
    for k, n in enumerate(arrays, start=1):
        ext = final[n]
        base = tuple(k * blocks[j] for j in range(dim))
        dims = tuple((base[j] + 1, 1, base[j] + (ext[j] if j < len(ext) else 1)) for j in range(dim))
        slots.append(ConnectorSlot(n, ext, base, IntervalSet(dim, (MDInterval.of(*dims),))))
    return VertexNumbering(dim, blocks, tuple(slots))


def _iterator_dims(c: Connect, scope: tuple[LoopIter, ...]) -> dict[str, int]:
    """Edge dimension carried by each iterator: the index position it appears in."""
    where: dict[str, int] = {}
    for r in (c.left, c.right):
        for j, e in enumerate(r.indices):
            for n in e.names & {it.name for it in scope}:
                if where.setdefault(n, j) != j:
                    raise located(
                        f"iterator {n!r} indexes position {where[n] + 1} on one side and {j + 1} on the other",
                        r.pos,
                    )
    seen: dict[int, str] = {}
    for n, j in where.items():
        if j in seen:
            raise located(f"iterators {seen[j]!r} and {n!r} both index position {j + 1}", c.pos)
        seen[j] = n
    return where


def _side_map(r: Ref, slot: ConnectorSlot, dim: int, by_dim: dict[int, str], lows: dict[str, int], params) -> AffinePiece:
    gain, offset = [], []
    for j in range(dim):
        if j >= len(r.indices):
            gain.append(0)
            offset.append(slot.base[j] + 1)
            continue
        e = r.indices[j].substitute(params, keep=frozenset(lows))
        it = by_dim.get(j)
        a = e.coef(it) if it is not None else Fraction(0)
        if e.names - ({it} if it else set()):
            # an iterator of another dimension reached this index
            raise located(f"index {r.indices[j]} of {r.connector} uses an iterator of another dimension", r.pos)
        # edge coordinate e_j = i - lo + 1
        lo = lows.get(it, 1) if it else 1
        gain.append(a)
        offset.append(slot.base[j] + e.const + a * (lo - 1))
    return AffinePiece(tuple(gain), tuple(offset))


@dataclass
class _EdgeGroup:
    left: str
    right: str
    pieces: list[tuple[MDInterval, AffinePiece, AffinePiece, Connect]]


def build_graph(model: ConnectModel, numbering: VertexNumbering, params: Mapping[str, int] | None = None) -> SBGraph:
    params = dict(params or {})
    dim = numbering.dim
    groups: dict[frozenset, _EdgeGroup] = {}
    order: list[frozenset] = []
    for c, scope in model.connects():
        ranges = _ranges(scope, params)
        if any(a > b for a, b in ranges.values()):
            continue
        if c.left.connector == c.right.connector and c.left.indices == c.right.indices:
            raise located(f"{c.left} is connected to itself", c.pos)
        where = _iterator_dims(c, scope)
        for it in scope:
            if it.name not in where:
                warnings.warn(f"{it.pos}: iterator {it.name!r} is not used by the connect at {c.pos}", stacklevel=2)
        by_dim = {j: n for n, j in where.items()}
        lows = {n: ranges[n][0] for n in where}
        domain = MDInterval.of(*[
            (1, 1, ranges[by_dim[j]][1] - ranges[by_dim[j]][0] + 1) if j in by_dim else (1, 1, 1)
            for j in range(dim)
        ])
        sides = []
        for r in (c.left, c.right):
            slot = numbering.slot(r.connector)
            fn = _side_map(r, slot, dim, by_dim, lows, params)
            try:
                fn.check_integral(domain)
            except ValueError:
                raise located(f"index of {r} is not an integer for every iteration", r.pos) from None
            sides.append(fn)
        key = frozenset((c.left.connector, c.right.connector))
        if key not in groups:
            groups[key] = _EdgeGroup(c.left.connector, c.right.connector, [])
            order.append(key)
        g = groups[key]
        f1, f2 = sides if c.left.connector == g.left else sides[::-1]
        if any(d == domain and (a, b) in ((f1, f2), (f2, f1)) for d, a, b, _ in g.pieces):
            warnings.warn(f"{c.pos}: duplicate connection dropped", stacklevel=2)
            continue
        g.pieces.append((domain, f1, f2, c))
    names = [s.name for s in numbering.slots]
    vertices = [SetVertex(s.name, s.vset) for s in numbering.slots]
    edges = []
    for h, key in enumerate(order, start=1):
        g = groups[key]
        m1, m2 = [], []
        shift = 0
        for domain, f1, f2, _ in g.pieces:
            a, s, b = domain.dims[0]
            moved = domain.with_dim(0, (a + shift, s, b + shift))
            for side, fn in ((m1, f1), (m2, f2)):
                side.append((moved, AffinePiece(fn.gain, (fn.offset[0] - fn.gain[0] * shift,) + fn.offset[1:])))
            shift = moved.dims[0][2]
        edges.append(SetEdge(
            f"E{h}[{g.left},{g.right}]", names.index(g.left), names.index(g.right),
            _build(dim, m1), _build(dim, m2),
        ))
    return SBGraph(tuple(vertices), tuple(edges), dim)


def flatten_graph(model: ConnectModel, params: Mapping[str, int]) -> tuple[SBGraph, VertexNumbering]:
    numbering = number_vertices(model, params)
    return build_graph(model, numbering, params), numbering

