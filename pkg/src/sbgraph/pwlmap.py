"""Piecewise linear maps on the integer lattice.

A :class:`PWLMap` is a list of ``(domain, fn)`` pairs with pairwise-disjoint
``IntervalSet`` domains and per-dimension affine functions
``v_j -> gain_j * v_j + offset_j``.  Output dimension ``j`` only depends on
input dimension ``j``, which is what makes every operation below computable
from interval endpoints alone.

Maps are kept in a canonical form: a dimension whose domain is a single value
is stored as a constant (gain 0), and pieces with the same function share one
domain.  Equality (``==``) is semantic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Iterator, Optional, Sequence

from . import interval as iv
from .errors import DimensionError, MapInfPreconditionError, SBGError, check_piece_count
from .interval import MDInterval, Point, Triple
from .sets import IntervalSet, compact_boxes, is_disjoint, set_equals, set_minus, set_union

Atom = tuple[MDInterval, "AffinePiece"]

# Layers tried when skipping a translation that moves along several dimensions.
_MAX_LAYERS = 64
_MAX_ROUNDS = 128


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise ValueError(f"non-integral value {x}")
    return x.numerator


@dataclass(frozen=True)
class AffinePiece:
    """Per-dimension ``gain * v + offset`` with non-negative rational gains."""

    gain: tuple[Fraction, ...]
    offset: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        g = tuple(_frac(x) for x in self.gain)
        o = tuple(_frac(x) for x in self.offset)
        if len(g) != len(o) or not g:
            raise DimensionError("gain and offset must have the same, non-zero length")
        if any(x < 0 for x in g):
            raise ValueError(f"gains must be non-negative, got {g}")
        for gj, oj in zip(g, o):
            if gj.denominator == 1 and oj.denominator != 1:
                raise ValueError(f"integer gain {gj} needs an integer offset, got {oj}")
        object.__setattr__(self, "gain", g)
        object.__setattr__(self, "offset", o)

    @classmethod
    def identity(cls, dim: int) -> "AffinePiece":
        return cls((1,) * dim, (0,) * dim)

    @classmethod
    def constant(cls, point: Sequence[int]) -> "AffinePiece":
        return cls((0,) * len(point), tuple(point))

    @classmethod
    def translation(cls, vec: Sequence[int]) -> "AffinePiece":
        return cls((1,) * len(vec), tuple(vec))

    @property
    def dim(self) -> int:
        return len(self.gain)

    def apply(self, p: Sequence[int]) -> Point:
        p = iv.as_point(p)
        return tuple(_as_int(g * x + o) for g, x, o in zip(self.gain, p, self.offset))

    def after(self, inner: "AffinePiece") -> "AffinePiece":
        """``self ∘ inner``."""
        return AffinePiece(
            tuple(g1 * g2 for g1, g2 in zip(self.gain, inner.gain)),
            tuple(g1 * o2 + o1 for g1, o1, o2 in zip(self.gain, self.offset, inner.offset)),
        )

    def is_identity(self) -> bool:
        return all(g == 1 and o == 0 for g, o in zip(self.gain, self.offset))

    def is_identity_on(self, box: MDInterval) -> bool:
        for g, o, (a, _, b) in zip(self.gain, self.offset, box.dims):
            if a == b:
                if g * a + o != a:
                    return False
            elif g != 1 or o != 0:
                return False
        return True

    def canonical(self, box: MDInterval) -> "AffinePiece":
        """Same function on ``box`` with singleton dimensions made constant."""
        if all(a != b or g == 0 for g, (a, _, b) in zip(self.gain, box.dims)):
            return self
        gain, offset = list(self.gain), list(self.offset)
        for j, (a, _, b) in enumerate(box.dims):
            if a == b and gain[j] != 0:
                offset[j] = gain[j] * a + offset[j]
                gain[j] = Fraction(0)
        return AffinePiece(tuple(gain), tuple(offset))

    def check_integral(self, box: MDInterval) -> None:
        for g, o, (a, s, b) in zip(self.gain, self.offset, box.dims):
            y = g * a + o
            if y.denominator != 1 or y < 0:
                raise ValueError(f"{self} maps {box} outside the natural numbers")
            if a != b and (g * s).denominator != 1:
                raise ValueError(f"{self} maps {box} outside the natural numbers")

    def image_box(self, box: MDInterval) -> MDInterval:
        dims = []
        for g, o, (a, s, b) in zip(self.gain, self.offset, box.dims):
            if g == 0 or a == b:
                y = _as_int(g * a + o)
                dims.append((y, 1, y))
            else:
                dims.append((_as_int(g * a + o), _as_int(g * s), _as_int(g * b + o)))
        return MDInterval(tuple(dims))

    def preimage_box(self, box: MDInterval, target: MDInterval) -> Optional[MDInterval]:
        """Points of ``box`` that this function sends into ``target``."""
        dims = []
        for g, o, d, t in zip(self.gain, self.offset, box.dims, target.dims):
            a, s, b = d
            if g == 0 or a == b:
                if not iv.contains1(t, g * a + o):
                    return None
                dims.append(d)
                continue
            img = (_as_int(g * a + o), _as_int(g * s), _as_int(g * b + o))
            c = iv.intersect1(img, t)
            if c is None:
                return None
            lo = _as_int((c[0] - o) / g)
            hi = _as_int((c[2] - o) / g)
            dims.append((lo, 1, lo) if lo == hi else (lo, _as_int(c[1] / g), hi))
        return MDInterval(tuple(dims))

    def __str__(self) -> str:
        return render_affine(self)


def _lin(g: Fraction, o: Fraction, var: str) -> str:
    if g == 0:
        return str(o)
    head = var if g == 1 else f"{g}*{var}"
    if o == 0:
        return head
    return f"{head}+{o}" if o > 0 else f"{head}-{-o}"


def render_affine(fn: AffinePiece) -> str:
    if fn.dim == 1:
        return _lin(fn.gain[0], fn.offset[0], "v")
    if all(g == 1 for g in fn.gain):
        if all(o == 0 for o in fn.offset):
            return "v"
        return "v+[" + ";".join(str(o) for o in fn.offset) + "]"
    if all(g == 0 for g in fn.gain):
        return "[" + ";".join(str(o) for o in fn.offset) + "]"
    return "[" + ";".join(_lin(g, o, f"v{j + 1}") for j, (g, o) in enumerate(zip(fn.gain, fn.offset))) + "]"


@dataclass(frozen=True, eq=False)
class PWLMap:
    """A piecewise linear map; build with :meth:`from_pieces` or :meth:`identity`."""

    dim: int
    pieces: tuple[tuple[IntervalSet, AffinePiece], ...] = ()

    @classmethod
    def empty(cls, dim: int) -> "PWLMap":
        return cls(dim, ())

    @classmethod
    def identity(cls, domain: IntervalSet) -> "PWLMap":
        return _build(domain.dim, [(b, AffinePiece.identity(domain.dim)) for b in domain.pieces])

    @classmethod
    def from_pieces(
        cls, dim: int, pieces: Iterable[tuple[IntervalSet | MDInterval, AffinePiece | tuple]]
    ) -> "PWLMap":
        """Validated construction: domains must be disjoint and images natural."""
        atoms: list[Atom] = []
        for dom, fn in pieces:
            if not isinstance(fn, AffinePiece):
                fn = AffinePiece(*fn)
            boxes = (dom,) if isinstance(dom, MDInterval) else dom.pieces
            for b in boxes:
                if b.dim != dim or fn.dim != dim:
                    raise DimensionError(f"piece of dimension {b.dim}/{fn.dim} in a map of dimension {dim}")
                fn.check_integral(b)
                atoms.append((b, fn))
        if not is_disjoint([b for b, _ in atoms]):
            raise ValueError("map domains overlap")
        return _build(dim, atoms)

    def atoms(self) -> Iterator[Atom]:
        for dom, fn in self.pieces:
            for b in dom.pieces:
                yield b, fn

    def atom_count(self) -> int:
        return sum(len(dom.pieces) for dom, _ in self.pieces)

    @cached_property
    def domain(self) -> IntervalSet:
        return IntervalSet(self.dim, tuple(compact_boxes([b for b, _ in self.atoms()])))

    def is_empty(self) -> bool:
        return not self.pieces

    def apply(self, p: Sequence[int]) -> Point:
        p = iv.as_point(p)
        for b, fn in self.atoms():
            if b.contains(p):
                return fn.apply(p)
        raise KeyError(f"{p} is outside the map domain")

    __call__ = apply

    def image(self, s: IntervalSet | None = None) -> IntervalSet:
        return image_of(self, s)

    def preimage(self, s: IntervalSet) -> IntervalSet:
        return preimage_of(self, s)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PWLMap):
            return NotImplemented
        return map_equals(self, other)

    __hash__ = None  # type: ignore[assignment]

    def render(self) -> str:
        lines = []
        for b, fn in self.atoms():
            text = "v" if fn.is_identity_on(b) else str(fn)
            lines.append(f"{text} if v in {{{b}}}")
        return "\n".join(lines)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"PWLMap(dim={self.dim}, pieces={self.atom_count()})"


def _build(dim: int, atoms: Iterable[Atom]) -> PWLMap:
    """Canonicalize trusted atoms (already disjoint and integral) into a map."""
    groups: dict[AffinePiece, list[MDInterval]] = {}
    for b, fn in atoms:
        groups.setdefault(fn.canonical(b), []).append(b)
    pieces = []
    total = 0
    for fn, boxes in groups.items():
        boxes = compact_boxes(boxes)
        total += len(boxes)
        pieces.append((IntervalSet(dim, tuple(boxes)), fn))
    check_piece_count(total, "map")
    pieces.sort(key=lambda p: p[0].pieces[0].start)
    return PWLMap(dim, tuple(pieces))


def _check(m1: PWLMap, m2: PWLMap) -> None:
    if m1.dim != m2.dim:
        raise DimensionError(f"dimension {m1.dim} vs {m2.dim}")


def image_of(m: PWLMap, s: IntervalSet | None = None) -> IntervalSet:
    """Image of ``s`` (default: the whole domain) under ``m``."""
    boxes = []
    for b, fn in m.atoms():
        parts = [b] if s is None else [c for t in s.pieces if (c := iv.intersect(b, t)) is not None]
        boxes.extend(fn.image_box(c) for c in parts)
    out = IntervalSet.empty(m.dim)
    # images of disjoint boxes may overlap
    for b in boxes:
        out = set_union(out, IntervalSet(m.dim, (b,)))
    return out


def preimage_of(m: PWLMap, s: IntervalSet) -> IntervalSet:
    if s.dim != m.dim:
        raise DimensionError(f"dimension {s.dim} vs {m.dim}")
    boxes = []
    for b, fn in m.atoms():
        for t in s.pieces:
            pre = fn.preimage_box(b, t)
            if pre is not None:
                boxes.append(pre)
    # preimages of disjoint targets within one atom are disjoint; atoms are disjoint
    return IntervalSet(m.dim, tuple(compact_boxes(boxes)))


def restrict(m: PWLMap, s: IntervalSet) -> PWLMap:
    atoms = []
    for b, fn in m.atoms():
        for t in s.pieces:
            c = iv.intersect(b, t)
            if c is not None:
                atoms.append((c, fn))
    return _build(m.dim, atoms)


def compose(m1: PWLMap, m2: PWLMap) -> PWLMap:
    """``m1 ∘ m2``, defined where ``m2`` is defined and lands in the domain of ``m1``."""
    _check(m1, m2)
    atoms = []
    for b2, f2 in m2.atoms():
        for b1, f1 in m1.atoms():
            pre = f2.preimage_box(b2, b1)
            if pre is not None:
                atoms.append((pre, f1.after(f2)))
    return _build(m1.dim, atoms)


def combine(m1: PWLMap, m2: PWLMap) -> PWLMap:
    """``m1`` where it is defined, ``m2`` elsewhere."""
    _check(m1, m2)
    if m1.is_empty():
        return m2
    rest = restrict(m2, set_minus(m2.domain, m1.domain)) if not m2.is_empty() else m2
    return _build(m1.dim, list(m1.atoms()) + list(rest.atoms()))


def _order_split(box: MDInterval, f1: AffinePiece, f2: AffinePiece):
    """Partition ``box`` into regions where ``f1`` is lexicographically <, =, > ``f2``."""
    lt: list[MDInterval] = []
    eq: list[MDInterval] = []
    gt: list[MDInterval] = []
    pending = [(box, 0)]
    while pending:
        b, j = pending.pop()
        if j == b.dim:
            eq.append(b)
            continue
        dg = f1.gain[j] - f2.gain[j]
        do = f1.offset[j] - f2.offset[j]
        a, s, e = b.dims[j]
        if dg == 0 or a == e:
            delta = dg * a + do
            if delta < 0:
                lt.append(b)
            elif delta > 0:
                gt.append(b)
            else:
                pending.append((b, j + 1))
            continue
        below, at, above = iv.split_at(b.dims[j], -do / dg)
        neg, pos = (below, above) if dg > 0 else (above, below)
        if neg is not None:
            lt.append(b.with_dim(j, neg))
        if pos is not None:
            gt.append(b.with_dim(j, pos))
        if at is not None:
            pending.append((b.with_dim(j, at), j + 1))
    return lt, eq, gt


def min_map(m1: PWLMap, m2: PWLMap) -> PWLMap:
    """Pointwise lexicographic minimum; ties go to ``m1``."""
    _check(m1, m2)
    if m1.is_empty():
        return m2
    if m2.is_empty():
        return m1
    atoms: list[Atom] = []
    for b1, f1 in m1.atoms():
        for b2, f2 in m2.atoms():
            c = iv.intersect(b1, b2)
            if c is None:
                continue
            if f1 == f2:
                atoms.append((c, f1))
                continue
            lt, eq, gt = _order_split(c, f1, f2)
            atoms.extend((x, f1) for x in lt + eq)
            atoms.extend((x, f2) for x in gt)
    d1, d2 = m1.domain, m2.domain
    atoms.extend(restrict(m1, set_minus(d1, d2)).atoms())
    atoms.extend(restrict(m2, set_minus(d2, d1)).atoms())
    return _build(m1.dim, atoms)


def min_adj_map(m1: PWLMap, m2: PWLMap) -> PWLMap:
    """The map ``v -> min{ m2(e) : m1(e) = v }``.

    On each common piece, dimensions where ``m1`` has non-zero gain are
    inverted; in dimensions where ``m1`` is constant the edge coordinate is
    free and is set to its smallest value, which minimizes ``m2`` there since
    gains are non-negative.  Results of different pieces are merged with
    :func:`min_map`.
    """
    _check(m1, m2)
    if not set_equals(m1.domain, m2.domain):
        raise ValueError("min_adj_map needs two maps with the same domain")
    parts = []
    for b1, f1 in m1.atoms():
        for b2, f2 in m2.atoms():
            c = iv.intersect(b1, b2)
            if c is None:
                continue
            gain, offset = [], []
            for j, (a, _, _) in enumerate(c.dims):
                g1, o1, g2, o2 = f1.gain[j], f1.offset[j], f2.gain[j], f2.offset[j]
                if g1 != 0:
                    gain.append(g2 / g1)
                    offset.append(o2 - g2 * o1 / g1)
                else:
                    gain.append(Fraction(0))
                    offset.append(g2 * a + o2)
            img = f1.image_box(c)
            parts.append(_build(m1.dim, [(img, AffinePiece(tuple(gain), tuple(offset)))]))
    return reduce(min_map, parts, PWLMap.empty(m1.dim))


def map_equals(m1: PWLMap, m2: PWLMap) -> bool:
    _check(m1, m2)
    if not set_equals(m1.domain, m2.domain):
        return False
    for b1, f1 in m1.atoms():
        for b2, f2 in m2.atoms():
            c = iv.intersect(b1, b2)
            if c is None or f1 == f2:
                continue
            if f1.canonical(c) != f2.canonical(c):
                return False
    return True


def _check_map_inf(m: PWLMap) -> None:
    for b, fn in m.atoms():
        if any(g not in (0, 1) for g in fn.gain):
            raise MapInfPreconditionError(f"gain {fn.gain} outside {{0, 1}} on {b}")
        _, _, gt = _order_split(b, fn, AffinePiece.identity(m.dim))
        if gt:
            raise MapInfPreconditionError(f"{fn} increases points of {gt[0]}")


def _translation(box: MDInterval, fn: AffinePiece) -> Optional[tuple[int, ...]]:
    """The vector ``fn(v) - v`` if it is the same for every ``v`` in ``box``."""
    vec = []
    for g, o, (a, _, b) in zip(fn.gain, fn.offset, box.dims):
        if g == 1:
            vec.append(int(o))
        elif a == b:
            vec.append(int(g * a + o) - a)
        else:
            return None
    return tuple(vec)


def _with_dim(fn: AffinePiece, j: int, gain, offset) -> AffinePiece:
    g, o = list(fn.gain), list(fn.offset)
    g[j], o[j] = Fraction(gain), Fraction(offset)
    return AffinePiece(tuple(g), tuple(o))


def _shift1(t: Triple, delta: int) -> Optional[Triple]:
    a, s, b = t
    a, b = a + delta, b + delta
    if b < 0:
        return None
    if a < 0:
        a += (-a + s - 1) // s * s
    return iv.norm1(a, s, b)


def _skip_translation(box: MDInterval, vec: tuple[int, ...]) -> list[Atom]:
    """Replace ``v -> v + vec`` on ``box`` by a jump to where the orbit leaves ``box``."""
    moving = [j for j, t in enumerate(vec) if t != 0]
    translation = AffinePiece.translation(vec)
    for j in moving:
        a, s, b = box.dims[j]
        if a == b or vec[j] % s:
            # a single step already leaves the box
            return [(box, translation)]
    if len(moving) == 1 and vec[moving[0]] < 0:
        j = moving[0]
        a, s, b = box.dims[j]
        c = -vec[j]
        classes = c // s
        n = iv.count1(box.dims[j])
        steps = -(-n // classes)
        if steps == 1:
            return [(box, translation)]
        out = []
        if classes <= steps:
            # each residue class mod c exits at its own point below a
            for r in range(classes):
                sub = iv.norm1(a + r * s, c, b)
                out.append((box.with_dim(j, sub), _with_dim(translation, j, 0, a + r * s - c)))
        else:
            # layer k holds the points that need exactly k steps
            for k in range(1, steps + 1):
                sub = iv.norm1(a + (k - 1) * c, s, min(b, a + k * c - s))
                out.append((box.with_dim(j, sub), _with_dim(translation, j, 1, k * vec[j])))
        return out
    out = []
    cur: Optional[MDInterval] = box
    k = 1
    while cur is not None:
        if k > _MAX_LAYERS:
            return [(box, translation)]
        nxt_dims = []
        for t, d, cd in zip(vec, box.dims, cur.dims):
            shifted = _shift1(d, -k * t)
            common = iv.intersect1(cd, shifted) if shifted is not None else None
            if common is None:
                nxt_dims = None
                break
            nxt_dims.append(common)
        nxt = MDInterval(tuple(nxt_dims)) if nxt_dims else None
        layer = iv.difference(cur, nxt) if nxt is not None else [cur]
        step = AffinePiece.translation(tuple(k * t for t in vec))
        out.extend((x, step) for x in layer)
        cur = nxt
        k += 1
    return out


def _skip_all(m: PWLMap) -> PWLMap:
    atoms: list[Atom] = []
    for b, fn in m.atoms():
        # restrict constant dimensions to their own value: there fn is a translation
        fixed_dims = []
        for j, (g, o) in enumerate(zip(fn.gain, fn.offset)):
            if g == 0 and b.dims[j][0] != b.dims[j][2]:
                fixed_dims.append((j, int(o)))
        core: Optional[MDInterval] = b
        for j, c in fixed_dims:
            if core is not None and iv.contains1(core.dims[j], c):
                core = core.with_dim(j, (c, 1, c))
            else:
                core = None
        if core is None:
            atoms.append((b, fn))
            continue
        if core != b:
            atoms.extend((x, fn) for x in iv.difference(b, core))
        vec = _translation(core, fn)
        if vec is None or not any(vec):
            atoms.append((core, fn))
        else:
            atoms.extend(_skip_translation(core, vec))
    return _build(m.dim, atoms)


def map_inf(m: PWLMap) -> PWLMap:
    """Fixed point of composing ``m`` with itself, without iterating pointwise.

    Requires gains in {0, 1} and ``m(v) <= v`` lexicographically.  Pieces that
    translate inside their own domain are first replaced by jumps to their exit
    points; the remaining chains between pieces are then collapsed by repeated
    squaring, so the number of rounds grows with the log of the chain length
    in pieces, never with the number of points.
    """
    _check_map_inf(m)
    for _ in range(_MAX_ROUNDS):
        m = _skip_all(m)
        nxt = combine(compose(m, m), m)
        if map_equals(nxt, m):
            return m
        m = nxt
    raise SBGError("map_inf did not converge")
