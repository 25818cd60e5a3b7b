"""Effort/flow equations from a representative map.

The image of the map is split into atomic intervals; for each atom ``I`` the
preimage under every piece is one box ``P``.  Non-representatives in ``P``
get ``effort(v) = effort(rep)`` and all of ``P`` contributes to the single
flow balance written over ``I``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .. import interval as iv
from ..interval import MDInterval, Point
from ..pwlmap import AffinePiece, PWLMap, _lin

_NAMES = ("i", "j", "k", "l", "m", "n")


def iterator_names(dim: int) -> tuple[str, ...]:
    if dim <= len(_NAMES):
        return _NAMES[:dim]
    return tuple(f"i{j + 1}" for j in range(dim))


@dataclass(frozen=True)
class EffortEquation:
    """``effort(v) = effort(fn(v))`` for every ``v`` in ``domain``."""

    domain: MDInterval
    fn: AffinePiece

    def expand(self) -> Iterator[tuple[Point, Point]]:
        for v in self.domain:
            yield v, self.fn.apply(v)

    def render(self) -> str:
        names = iterator_names(self.domain.dim)
        args = []
        for x, g, o, (a, _, b) in zip(names, self.fn.gain, self.fn.offset, self.domain.dims):
            args.append(str(g * a + o) if a == b else _lin(g, o, x))
        return _loop(self.domain, f"effort({','.join(names)}) = effort({','.join(args)})")


@dataclass(frozen=True)
class FlowTerm:
    """The points of ``source`` that ``fn`` sends to the loop point."""

    source: MDInterval
    fn: AffinePiece

    def members(self, v: Point) -> list[Point]:
        choices = []
        for x, g, o, t in zip(v, self.fn.gain, self.fn.offset, self.source.dims):
            if t[0] == t[2]:
                choices.append([t[0]])
            elif g != 0:
                choices.append([int((x - o) / g)])
            else:
                choices.append(range(t[0], t[2] + 1, t[1]))
        return [p for p in _product(choices)]

    def render(self, loop: MDInterval) -> str:
        names = iterator_names(loop.dim)
        args, sums = [], []
        for x, g, o, t, lt in zip(names, self.fn.gain, self.fn.offset, self.source.dims, loop.dims):
            if t[0] == t[2]:
                args.append(_lin(Fraction(1), Fraction(t[0] - lt[0]), x))
            elif g != 0:
                args.append(_lin(1 / g, -o / g, x))
            else:
                args.append(f"{x}1")
                sums.append(f"{x}1 in [{t[0]}:{t[1]}:{t[2]}]")
        call = f"flow({','.join(args)})"
        return f"sum({call}, for {', '.join(sums)})" if sums else call


@dataclass(frozen=True)
class FlowEquation:
    """Sum of the flows of one component per loop point equals zero."""

    domain: MDInterval
    terms: tuple[FlowTerm, ...]

    def expand(self) -> Iterator[list[Point]]:
        for v in self.domain:
            group = [v]
            for t in self.terms:
                group.extend(t.members(v))
            yield group

    def render(self) -> str:
        names = iterator_names(self.domain.dim)
        parts = [f"flow({','.join(names)})"] + [t.render(self.domain) for t in self.terms]
        return _loop(self.domain, " + ".join(parts) + " = 0")


Equation = EffortEquation | FlowEquation


def _product(choices):
    out = [()]
    for c in choices:
        out = [p + (x,) for p in out for x in c]
    return out


def _loop(box: MDInterval, body: str) -> str:
    names = iterator_names(box.dim)
    return f"for {','.join(names)} in {{{box}}}\n  {body}\nend"


def image_atoms(rmap: PWLMap) -> list[MDInterval]:
    """Disjoint boxes such that every piece image is a union of some of them."""
    atoms: list[MDInterval] = []
    for b, fn in rmap.atoms():
        rest = [fn.image_box(b)]
        nxt = []
        for a in atoms:
            parts = [a]
            for r in rest:
                new_parts = []
                for p in parts:
                    c = iv.intersect(p, r)
                    if c is None:
                        new_parts.append(p)
                    else:
                        new_parts.append(c)
                        new_parts.extend(iv.difference(p, c))
                parts = new_parts
            nxt.extend(parts)
            rest = [x for r in rest for x in iv.difference(r, a)]
        atoms = nxt + rest
    return sorted(atoms, key=lambda a: a.start)


def generate_equations(rmap: PWLMap) -> list[Equation]:
    """Equations for every component, in the order of their representative atoms."""
    out: list[Equation] = []
    for atom in image_atoms(rmap):
        terms: list[FlowTerm] = []
        fixed = False
        for b, fn in rmap.atoms():
            pre = fn.preimage_box(b, atom)
            if pre is None:
                continue
            parts = [pre]
            if iv.intersect(pre, atom) is not None:
                if iv.intersect(pre, atom) != atom or not fn.is_identity_on(atom):
                    raise ValueError(f"map is not idempotent on {atom}")
                fixed = True
                parts = iv.difference(pre, atom)
            for p in parts:
                terms.append(FlowTerm(p, fn.canonical(p)))
                out.append(EffortEquation(p, fn.canonical(p)))
        if not fixed:
            raise ValueError(f"map is not idempotent: {atom} is not fixed")
        terms.sort(key=lambda t: t.source.start)
        out.append(FlowEquation(atom, tuple(terms)))
    return out


def render_equations(eqs: list[Equation]) -> str:
    return "\n".join(e.render() for e in eqs)


@dataclass(frozen=True)
class Expansion:
    effort: dict[Point, Point]
    flows: list[frozenset[Point]]


def expand_equations(eqs: list[Equation]) -> Expansion:
    effort: dict[Point, Point] = {}
    flows: list[frozenset[Point]] = []
    for e in eqs:
        if isinstance(e, EffortEquation):
            for v, w in e.expand():
                if v in effort:
                    raise ValueError(f"two effort equations for {v}")
                effort[v] = w
        else:
            for group in e.expand():
                if len(set(group)) != len(group):
                    raise ValueError(f"flow of {group[0]} summed twice")
                flows.append(frozenset(group))
    return Expansion(effort, flows)


def blocks(text: str) -> list[str]:
    """Split a listing into whitespace-normalized ``for ... end`` blocks."""
    out, cur = [], []
    for line in text.splitlines():
        line = " ".join(line.split())
        if not line:
            continue
        cur.append(line)
        if line == "end":
            out.append("\n".join(cur))
            cur = []
    if cur:
        out.append("\n".join(cur))
    return out


def same_listing(a: str, b: str) -> bool:
    """Listings equal up to block order and whitespace."""
    return sorted(blocks(a)) == sorted(blocks(b))
