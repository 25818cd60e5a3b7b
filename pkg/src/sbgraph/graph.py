"""Set-based graphs and their connected components computed by intension."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

from . import interval as iv
from .errors import ValidationError
from .interval import MDInterval
from .pwlmap import (
    AffinePiece,
    PWLMap,
    _build,
    compose,
    image_of,
    map_inf,
    min_adj_map,
    min_map,
)
from .sets import IntervalSet, set_equals, set_minus, set_union

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SetVertex:
    name: str
    vset: IntervalSet


@dataclass(frozen=True)
class SetEdge:
    """Edges ``{map1(e), map2(e)}`` for every ``e`` in the shared domain.

    ``index1``/``index2`` are positions in :attr:`SBGraph.vertices`.
    """

    name: str
    index1: int
    index2: int
    map1: PWLMap
    map2: PWLMap

    @property
    def domain(self) -> IntervalSet:
        return self.map1.domain


@dataclass(frozen=True)
class SBGraph:
    vertices: tuple[SetVertex, ...]
    edges: tuple[SetEdge, ...] = ()
    dim: int = 1

    @classmethod
    def build(cls, vertices: Sequence[SetVertex], edges: Sequence[SetEdge] = ()) -> "SBGraph":
        dim = vertices[0].vset.dim if vertices else 1
        return cls(tuple(vertices), tuple(edges), dim)

    @property
    def all_vertices(self) -> IntervalSet:
        out = IntervalSet.empty(self.dim)
        for v in self.vertices:
            out = set_union(out, v.vset)
        return out

    def vertex_index(self, name: str) -> int:
        for i, v in enumerate(self.vertices):
            if v.name == name:
                return i
        raise KeyError(name)


@dataclass(frozen=True)
class Violation:
    rule: str
    where: str
    detail: str

    def __str__(self) -> str:
        return f"{self.rule}: {self.where}: {self.detail}"


def _common_atoms(m1: PWLMap, m2: PWLMap):
    for b1, f1 in m1.atoms():
        for b2, f2 in m2.atoms():
            c = iv.intersect(b1, b2)
            if c is not None:
                yield c, f1, f2


def _self_loop(box: MDInterval, f1: AffinePiece, f2: AffinePiece) -> bool:
    """Whether some ``e`` in ``box`` has ``f1(e) == f2(e)``."""
    for j, t in enumerate(box.dims):
        dg = f1.gain[j] - f2.gain[j]
        do = f2.offset[j] - f1.offset[j]
        if dg == 0:
            if do != 0:
                return False
        elif not iv.contains1(t, do / dg):
            return False
    return True


def validate(g: SBGraph) -> list[Violation]:
    """Every structural problem with ``g``; an empty list means valid."""
    out: list[Violation] = []
    for v in g.vertices:
        if v.vset.dim != g.dim:
            out.append(Violation("dimension", v.name, f"dimension {v.vset.dim}, graph has {g.dim}"))
    for i, a in enumerate(g.vertices):
        for b in g.vertices[i + 1:]:
            if a.vset.dim == b.vset.dim and not (a.vset & b.vset).is_empty():
                out.append(Violation("disjointness", f"{a.name}/{b.name}", f"share {a.vset & b.vset}"))
    seen: dict[frozenset, str] = {}
    for e in g.edges:
        n = len(g.vertices)
        if not (0 <= e.index1 < n and 0 <= e.index2 < n):
            out.append(Violation("index", e.name, f"vertex index out of range ({e.index1}, {e.index2})"))
            continue
        pair = frozenset((e.index1, e.index2))
        if pair in seen:
            out.append(Violation("uniqueness", e.name, f"connects the same set-vertices as {seen[pair]}"))
        seen.setdefault(pair, e.name)
        if e.map1.dim != g.dim or e.map2.dim != g.dim:
            out.append(Violation("dimension", e.name, "map dimension differs from the graph"))
            continue
        if not set_equals(e.map1.domain, e.map2.domain):
            out.append(Violation("domain", e.name, f"map1 domain {e.map1.domain} != map2 domain {e.map2.domain}"))
        for m, idx, label in ((e.map1, e.index1, "map1"), (e.map2, e.index2, "map2")):
            target = g.vertices[idx]
            stray = set_minus(image_of(m), target.vset)
            if stray:
                out.append(Violation("containment", e.name, f"{label} image leaves {target.name}: {stray}"))
        for box, f1, f2 in _common_atoms(e.map1, e.map2):
            for j in range(g.dim):
                g1, g2 = f1.gain[j], f2.gain[j]
                if g1 != 0 and g2 != 0 and g1 != g2:
                    out.append(Violation(
                        "restriction-4", e.name,
                        f"piece {box} dimension {j + 1}: gains {g1} and {g2} are both non-zero and differ",
                    ))
            if _self_loop(box, f1, f2):
                out.append(Violation("self-loop", e.name, f"piece {box} joins a vertex to itself"))
    return out


def check_valid(g: SBGraph) -> None:
    problems = validate(g)
    if problems:
        raise ValidationError(problems)


def edge_block(g: SBGraph) -> int:
    """Power of ten larger than every first-dimension edge coordinate."""
    top = 0
    for e in g.edges:
        for b in e.map1.domain.pieces:
            top = max(top, b.end[0])
    block = 10
    while block <= top:
        block *= 10
    return block


def edge_maps(g: SBGraph) -> tuple[PWLMap, PWLMap]:
    """Left and right maps from one global edge-index space into the vertices.

    Set-edge ``h`` has its first edge coordinate shifted by ``h * block`` so
    the local domains become disjoint.
    """
    block = edge_block(g)
    left, right = [], []
    for h, e in enumerate(g.edges):
        shift = h * block
        for side, m in ((left, e.map1), (right, e.map2)):
            for b, fn in m.atoms():
                a, s, t = b.dims[0]
                moved = b.with_dim(0, (a + shift, s, t + shift))
                offset = (fn.offset[0] - fn.gain[0] * shift,) + fn.offset[1:]
                side.append((moved, AffinePiece(fn.gain, offset)))
    return _build(g.dim, left), _build(g.dim, right)


@dataclass
class ConnectStats:
    """``iterations`` counts passes that shrank the set of representatives;
    ``passes`` also counts the final pass that only confirmed convergence."""

    iterations: int = 0
    passes: int = 0
    pieces: list[int] = field(default_factory=list)

    @property
    def final_pieces(self) -> int:
        return self.pieces[-1] if self.pieces else 0

    def summary(self, valid: bool = True) -> str:
        steps = ",".join(str(p) for p in self.pieces)
        return (
            f"iterations={self.iterations} passes={self.passes} pieces={self.final_pieces} "
            f"piece_history=[{steps}] valid={'yes' if valid else 'no'}"
        )


def connect_comp(g: SBGraph) -> tuple[PWLMap, ConnectStats]:
    """Map every vertex to the lexicographically smallest vertex of its component."""
    vertices = g.all_vertices
    e1, e2 = edge_maps(g)
    rmap = PWLMap.identity(vertices)
    stats = ConnectStats(pieces=[rmap.atom_count()])
    old_image = IntervalSet.empty(g.dim)
    image = image_of(rmap)
    while not set_equals(old_image, image):
        er1 = compose(rmap, e1)
        er2 = compose(rmap, e2)
        t1 = min_adj_map(er1, er2)
        t2 = min_adj_map(er2, er1)
        trmap = min_map(min_map(rmap, t1), t2)
        old_image = image
        rmap = map_inf(trmap)
        image = image_of(rmap)
        stats.passes += 1
        if not set_equals(old_image, image):
            stats.iterations += 1
        stats.pieces.append(rmap.atom_count())
        log.debug("pass %d: %d pieces, %d representatives", stats.passes, rmap.atom_count(), image.cardinality())
    return rmap, stats
