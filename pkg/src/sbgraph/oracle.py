"""Brute-force reference: expand a set-based graph and run union-find on it.

Test-only; nothing on the intension path calls into this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import SBGError
from .graph import SBGraph, edge_maps
from .interval import Point
from .pwlmap import PWLMap

DEFAULT_LIMIT = 100_000


class ExpansionLimitError(SBGError):
    pass


@dataclass(frozen=True)
class ExplicitGraph:
    vertices: tuple[Point, ...]
    edges: tuple[tuple[Point, Point], ...]


def expand(g: SBGraph, limit: int = DEFAULT_LIMIT) -> ExplicitGraph:
    total = sum(v.vset.cardinality() for v in g.vertices)
    if total > limit:
        raise ExpansionLimitError(f"graph expands to {total} vertices, limit is {limit}")
    vertices = sorted(p for v in g.vertices for p in v.vset)
    e1, e2 = edge_maps(g)
    n_edges = e1.domain.cardinality()
    if n_edges > limit:
        raise ExpansionLimitError(f"graph expands to {n_edges} edges, limit is {limit}")
    edges = []
    for b, fn in e1.atoms():
        for e in b:
            edges.append((fn.apply(e), e2.apply(e)))
    return ExplicitGraph(tuple(vertices), tuple(edges))


class UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # keep the smaller point as root so roots are component minima
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra


def uf_components(g: ExplicitGraph) -> dict[Point, Point]:
    """Each vertex mapped to the lexicographic minimum of its component."""
    uf = UnionFind(g.vertices)
    for a, b in g.edges:
        uf.union(a, b)
    return {v: uf.find(v) for v in g.vertices}


def component_edge_counts(g: ExplicitGraph) -> dict[Point, int]:
    reps = uf_components(g)
    counts: dict[Point, int] = {}
    for a, _ in g.edges:
        counts[reps[a]] = counts.get(reps[a], 0) + 1
    return counts


@dataclass
class OracleReport:
    checked: int = 0
    mismatches: list[tuple[Point, Point | None, Point]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def render(self, first: int = 10) -> str:
        lines = [f"checked={self.checked} mismatches={len(self.mismatches)}"]
        for v, got, want in self.mismatches[:first]:
            lines.append(f"  v={v} rmap={got} oracle={want}")
        return "\n".join(lines)


def check_against_oracle(g: SBGraph, rmap: PWLMap, limit: int = DEFAULT_LIMIT) -> OracleReport:
    reps = uf_components(expand(g, limit))
    report = OracleReport(checked=len(reps))
    for v, want in reps.items():
        try:
            got = rmap.apply(v)
        except KeyError:
            got = None
        if got != want:
            report.mismatches.append((v, got, want))
    return report
