"""Multi-dimensional arithmetic-progression boxes.

An :class:`MDInterval` of dimension ``d`` is the Cartesian product of ``d``
progressions ``[start:step:end]``.  Every operation here works on the
``(start, step, end)`` triples only, so its cost does not depend on how many
points the interval holds.

Triples are kept normalized: ``end`` is attained and a singleton dimension
always has step 1.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator, Optional, Sequence

from .errors import DimensionError, EmptyError

Triple = tuple[int, int, int]
Point = tuple[int, ...]

# Number of 1-D progression intersections performed; lets tests assert that
# work depends on piece counts rather than on extents.
_ops = 0


def op_count() -> int:
    return _ops


def as_point(p) -> Point:
    """Accept a bare integer for 1-D points."""
    if isinstance(p, int):
        return (p,)
    return tuple(p)


def norm1(start: int, step: int, end: int) -> Optional[Triple]:
    """Normalize one progression; ``None`` when it is empty."""
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if start < 0:
        raise ValueError(f"coordinates must be natural numbers, got start {start}")
    if start > end:
        return None
    end = start + (end - start) // step * step
    if start == end:
        step = 1
    return (start, step, end)


def count1(t: Triple) -> int:
    return (t[2] - t[0]) // t[1] + 1


def contains1(t: Triple, x) -> bool:
    # x may be a Fraction; non-integral values are never members
    if x != int(x):
        return False
    x = int(x)
    return t[0] <= x <= t[2] and (x - t[0]) % t[1] == 0


def intersect1(x: Triple, y: Triple) -> Optional[Triple]:
    """Intersect two progressions by solving the pair of congruences."""
    global _ops
    _ops += 1
    a1, s1, b1 = x
    a2, s2, b2 = y
    lo = max(a1, a2)
    hi = min(b1, b2)
    if lo > hi:
        return None
    g = gcd(s1, s2)
    if (a2 - a1) % g:
        return None
    lcm = s1 // g * s2
    m = s2 // g
    k = (a2 - a1) // g * pow(s1 // g, -1, m) % m if m > 1 else 0
    x0 = a1 + k * s1
    first = lo + (x0 - lo) % lcm
    if first > hi:
        return None
    return norm1(first, lcm, hi)


def minus1(x: Triple, c: Triple) -> list[Triple]:
    """Pieces of ``x`` not in ``c``, where ``c`` is a non-empty sub-progression of ``x``."""
    a, s, b = x
    ca, cs, cb = c
    out: list[Triple] = []
    if ca > a:
        out.append(norm1(a, s, ca - s))
    if ca != cb and cs > s:
        ratio = cs // s
        n_c = count1(c)
        if ratio - 1 <= n_c - 1:
            # residue classes of x that c skips
            for t in range(1, ratio):
                out.append(norm1(ca + t * s, cs, cb))
        else:
            # the gaps between consecutive members of c
            for k in range(n_c - 1):
                lo = ca + k * cs
                out.append(norm1(lo + s, s, lo + cs - s))
    if cb < b:
        out.append(norm1(cb + s, s, b))
    return [t for t in out if t is not None]


def split_at(t: Triple, r) -> tuple[Optional[Triple], Optional[Triple], Optional[Triple]]:
    """Split a progression into the members below, equal to, and above ``r``."""
    a, s, b = t
    n = count1(t)
    q = Fraction(r - a) / s
    below_last = min(n - 1, _ceil(q) - 1)
    above_first = max(0, _floor(q) + 1)
    below = norm1(a, s, a + below_last * s) if below_last >= 0 else None
    above = norm1(a + above_first * s, s, b) if above_first <= n - 1 else None
    at = None
    if q == int(q) and 0 <= q <= n - 1:
        at = (int(a + q * s), 1, int(a + q * s))
    return below, at, above


def _floor(q: Fraction) -> int:
    return q.numerator // q.denominator


def _ceil(q: Fraction) -> int:
    return -_floor(-q)


@dataclass(frozen=True)
class MDInterval:
    """A normalized d-dimensional arithmetic-progression box."""

    dims: tuple[Triple, ...]

    def __post_init__(self) -> None:
        if not self.dims:
            raise ValueError("an interval needs at least one dimension")
        for t in self.dims:
            if norm1(*t) != tuple(t):
                raise ValueError(f"unnormalized progression {t}")

    @classmethod
    def of(cls, *triples: Sequence[int]) -> "MDInterval":
        """Build from per-dimension ``(start, step, end)``; raises if empty."""
        box = normalize([t[0] for t in triples], [t[1] for t in triples], [t[2] for t in triples])
        if box is None:
            raise EmptyError(f"empty interval {triples}")
        return box

    @classmethod
    def point(cls, p: Sequence[int]) -> "MDInterval":
        return cls(tuple((int(x), 1, int(x)) for x in p))

    @property
    def dim(self) -> int:
        return len(self.dims)

    @property
    def start(self) -> Point:
        return tuple(t[0] for t in self.dims)

    @property
    def step(self) -> Point:
        return tuple(t[1] for t in self.dims)

    @property
    def end(self) -> Point:
        return tuple(t[2] for t in self.dims)

    def cardinality(self) -> int:
        n = 1
        for t in self.dims:
            n *= count1(t)
        return n

    def is_singleton(self) -> bool:
        return all(t[0] == t[2] for t in self.dims)

    def contains(self, p: Sequence[int]) -> bool:
        p = as_point(p)
        if len(p) != self.dim:
            raise DimensionError(f"point of dimension {len(p)} vs interval of dimension {self.dim}")
        return all(contains1(t, x) for t, x in zip(self.dims, p))

    __contains__ = contains

    def min_elem(self) -> Point:
        return self.start

    def with_dim(self, j: int, t: Triple) -> "MDInterval":
        return MDInterval(self.dims[:j] + (t,) + self.dims[j + 1:])

    def __iter__(self) -> Iterator[Point]:
        ranges = [range(a, b + 1, s) for a, s, b in self.dims]
        return iter(itertools.product(*ranges))

    def __str__(self) -> str:
        return "x".join(f"[{a}:{s}:{b}]" for a, s, b in self.dims)

    def __repr__(self) -> str:
        return f"MDInterval({self})"


def normalize(start: Sequence[int], step: Sequence[int], end: Sequence[int]) -> Optional[MDInterval]:
    if not (len(start) == len(step) == len(end)):
        raise DimensionError("start, step and end must have equal length")
    dims = []
    for a, s, b in zip(start, step, end):
        t = norm1(a, s, b)
        if t is None:
            return None
        dims.append(t)
    return MDInterval(tuple(dims))


def cardinality(i: MDInterval) -> int:
    return i.cardinality()


def contains(i: MDInterval, p: Sequence[int]) -> bool:
    return i.contains(p)


def min_elem(i: Optional[MDInterval]) -> Point:
    if i is None:
        raise EmptyError("minimum of an empty interval")
    return i.min_elem()


def _check_dims(a: MDInterval, b: MDInterval) -> None:
    if a.dim != b.dim:
        raise DimensionError(f"dimension {a.dim} vs {b.dim}")


def intersect(a: MDInterval, b: MDInterval) -> Optional[MDInterval]:
    _check_dims(a, b)
    dims = []
    for x, y in zip(a.dims, b.dims):
        t = intersect1(x, y)
        if t is None:
            return None
        dims.append(t)
    return MDInterval(tuple(dims))


def difference(a: MDInterval, b: MDInterval) -> list[MDInterval]:
    """``a \\ b`` as disjoint boxes: one slab family per dimension."""
    _check_dims(a, b)
    c = intersect(a, b)
    if c is None:
        return [a]
    out = []
    for j in range(a.dim):
        for t in minus1(a.dims[j], c.dims[j]):
            out.append(MDInterval(c.dims[:j] + (t,) + a.dims[j + 1:]))
    return out


def lex_min(points) -> Point:
    return min(points)


_TRIPLE = re.compile(r"\[\s*(\d+)\s*:\s*(\d+)\s*:\s*(\d+)\s*\]")


def parse_interval(text: str) -> MDInterval:
    """Parse ``[a:s:b]x[c:t:d]`` (``×`` also accepted as separator)."""
    parts = re.split(r"\s*[x×]\s*", text.strip())
    triples = []
    for part in parts:
        m = _TRIPLE.fullmatch(part)
        if not m:
            raise ValueError(f"bad interval literal {text!r}")
        triples.append(tuple(int(g) for g in m.groups()))
    return MDInterval.of(*triples)
