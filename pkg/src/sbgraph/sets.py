"""Finite unions of disjoint :class:`MDInterval` boxes."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from . import interval as iv
from .errors import DimensionError, EmptyError, check_piece_count
from .interval import MDInterval, Point, Triple


@dataclass(frozen=True, eq=False)
class IntervalSet:
    """A set of lattice points stored as pairwise-disjoint boxes.

    ``==`` is semantic (both differences empty), so two sets listing their
    pieces differently still compare equal.  Instances are unhashable.
    """

    dim: int
    pieces: tuple[MDInterval, ...] = ()

    def __post_init__(self) -> None:
        for p in self.pieces:
            if p.dim != self.dim:
                raise DimensionError(f"piece {p} in a set of dimension {self.dim}")
        check_piece_count(len(self.pieces))

    @classmethod
    def empty(cls, dim: int) -> "IntervalSet":
        return cls(dim, ())

    @classmethod
    def of(cls, *boxes: MDInterval) -> "IntervalSet":
        """Union of arbitrary (possibly overlapping) boxes."""
        if not boxes:
            raise ValueError("use IntervalSet.empty(dim) for an empty set")
        out = cls(boxes[0].dim, ())
        for b in boxes:
            out = set_union(out, cls(b.dim, (b,)))
        return out

    @classmethod
    def box(cls, *triples: Sequence[int]) -> "IntervalSet":
        b = MDInterval.of(*triples)
        return cls(b.dim, (b,))

    def is_empty(self) -> bool:
        return not self.pieces

    def __bool__(self) -> bool:
        return bool(self.pieces)

    def cardinality(self) -> int:
        return sum(p.cardinality() for p in self.pieces)

    def contains(self, p: Sequence[int]) -> bool:
        p = iv.as_point(p)
        return any(b.contains(p) for b in self.pieces)

    __contains__ = contains

    def __iter__(self) -> Iterator[Point]:
        for b in self.pieces:
            yield from b

    def min(self) -> Point:
        return set_min(self)

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return set_union(self, other)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        return set_intersection(self, other)

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        return set_minus(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return set_equals(self, other)

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        return "{" + ", ".join(str(p) for p in self.pieces) + "}"

    def __repr__(self) -> str:
        return f"IntervalSet({self})"


def _check(a: IntervalSet, b: IntervalSet) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension {a.dim} vs {b.dim}")


def _minus_boxes(boxes: list[MDInterval], sub: Iterable[MDInterval]) -> list[MDInterval]:
    for s in sub:
        nxt: list[MDInterval] = []
        for b in boxes:
            nxt.extend(iv.difference(b, s))
        check_piece_count(len(nxt))
        boxes = nxt
        if not boxes:
            break
    return boxes


def set_union(a: IntervalSet, b: IntervalSet, compact: bool = True) -> IntervalSet:
    _check(a, b)
    extra = _minus_boxes(list(b.pieces), a.pieces)
    pieces = list(a.pieces) + extra
    if compact:
        pieces = compact_boxes(pieces)
    return IntervalSet(a.dim, tuple(pieces))


def set_intersection(a: IntervalSet, b: IntervalSet, compact: bool = True) -> IntervalSet:
    _check(a, b)
    pieces = []
    for x in a.pieces:
        for y in b.pieces:
            c = iv.intersect(x, y)
            if c is not None:
                pieces.append(c)
    if compact:
        pieces = compact_boxes(pieces)
    return IntervalSet(a.dim, tuple(pieces))


def set_minus(a: IntervalSet, b: IntervalSet, compact: bool = True) -> IntervalSet:
    _check(a, b)
    pieces = _minus_boxes(list(a.pieces), b.pieces)
    if compact:
        pieces = compact_boxes(pieces)
    return IntervalSet(a.dim, tuple(pieces))


def set_equals(a: IntervalSet, b: IntervalSet) -> bool:
    _check(a, b)
    if a.cardinality() != b.cardinality():
        return False
    return not _minus_boxes(list(a.pieces), b.pieces)


def set_min(a: IntervalSet) -> Point:
    if not a.pieces:
        raise EmptyError("minimum of an empty set")
    return min(p.min_elem() for p in a.pieces)


def is_disjoint(pieces: Sequence[MDInterval]) -> bool:
    for i, x in enumerate(pieces):
        for y in pieces[i + 1:]:
            if iv.intersect(x, y) is not None:
                return False
    return True


def _merge1(p: Triple, q: Triple) -> Triple | None:
    """Join two progressions with ``p`` entirely before ``q``, if the union is one."""
    (a1, s1, b1), (a2, s2, b2) = p, q
    p_single, q_single = a1 == b1, a2 == b2
    if p_single and q_single:
        return (a1, 1, a2) if a2 - a1 == 1 else None
    if p_single:
        return (a1, s2, b2) if a2 - a1 == s2 else None
    if q_single:
        return (a1, s1, a2) if a2 - b1 == s1 else None
    if s1 == s2 and a2 - b1 == s1:
        return (a1, s1, b2)
    return None


def compact_boxes(boxes: list[MDInterval]) -> list[MDInterval]:
    """Merge boxes that agree on all dimensions but one and abut on that one."""
    boxes = list(boxes)
    if len(boxes) < 2:
        return boxes
    changed = True
    while changed:
        changed = False
        for j in range(boxes[0].dim):
            buckets: dict[tuple, list[MDInterval]] = {}
            for b in boxes:
                buckets.setdefault(b.dims[:j] + b.dims[j + 1:], []).append(b)
            out = []
            for group in buckets.values():
                group.sort(key=lambda b: b.dims[j][0])
                cur = group[0]
                for nxt in group[1:]:
                    m = _merge1(cur.dims[j], nxt.dims[j]) if cur.dims[j][2] < nxt.dims[j][0] else None
                    if m is not None:
                        cur = cur.with_dim(j, m)
                        changed = True
                    else:
                        out.append(cur)
                        cur = nxt
                out.append(cur)
            boxes = out
    boxes.sort(key=lambda b: b.start)
    return boxes


_PIECE = re.compile(r"\[[^\]]*\](?:\s*[x×]\s*\[[^\]]*\])*")


def parse_set(text: str, dim: int | None = None) -> IntervalSet:
    """Parse ``{[a:s:b]x[c:t:d], ...}``; ``{}`` needs ``dim``."""
    body = text.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ValueError(f"set literal must be braced: {text!r}")
    inner = body[1:-1].strip()
    boxes = [iv.parse_interval(m.group(0)) for m in _PIECE.finditer(inner)]
    leftover = _PIECE.sub("", inner).replace(",", "").strip()
    if leftover:
        raise ValueError(f"bad set literal {text!r}")
    if not boxes:
        if dim is None:
            raise ValueError("empty set literal needs an explicit dimension")
        return IntervalSet.empty(dim)
    if dim is not None and boxes[0].dim != dim:
        raise DimensionError(f"expected dimension {dim}, got {boxes[0].dim}")
    if is_disjoint(boxes):
        return IntervalSet(boxes[0].dim, tuple(boxes))
    return IntervalSet.of(*boxes)
