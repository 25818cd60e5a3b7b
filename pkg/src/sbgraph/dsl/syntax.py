"""AST for the connection language."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Union

from ..errors import ParseError, UnboundParameterError


@dataclass(frozen=True)
class Pos:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Linear:
    """``const + sum(coef * name)`` with rational coefficients."""

    terms: tuple[tuple[str, Fraction], ...] = ()
    const: Fraction = Fraction(0)

    @classmethod
    def num(cls, value) -> "Linear":
        return cls((), Fraction(value))

    @classmethod
    def var(cls, name: str) -> "Linear":
        return cls(((name, Fraction(1)),), Fraction(0))

    @property
    def names(self) -> set[str]:
        return {n for n, _ in self.terms}

    def coef(self, name: str) -> Fraction:
        return dict(self.terms).get(name, Fraction(0))

    def is_constant(self) -> bool:
        return not self.terms

    def _combine(self, other: "Linear", sign: int) -> "Linear":
        acc = dict(self.terms)
        for n, c in other.terms:
            acc[n] = acc.get(n, Fraction(0)) + sign * c
        return Linear(tuple(sorted((n, c) for n, c in acc.items() if c != 0)), self.const + sign * other.const)

    def __add__(self, other: "Linear") -> "Linear":
        return self._combine(other, 1)

    def __sub__(self, other: "Linear") -> "Linear":
        return self._combine(other, -1)

    def scale(self, k: Fraction) -> "Linear":
        if k == 0:
            return Linear.num(0)
        return Linear(tuple((n, c * k) for n, c in self.terms), self.const * k)

    def substitute(self, params: Mapping[str, int], keep: frozenset = frozenset()) -> "Linear":
        """Replace every name not in ``keep`` by its value from ``params``."""
        out = Linear.num(self.const)
        for n, c in self.terms:
            if n in keep:
                out = out + Linear.var(n).scale(c)
            elif n in params:
                out = out + Linear.num(Fraction(params[n]) * c)
            else:
                raise UnboundParameterError(n)
        return out

    def value(self, params: Mapping[str, int]) -> Fraction:
        return self.substitute(params).const

    def __str__(self) -> str:
        parts = []
        for n, c in self.terms:
            parts.append(n if c == 1 else f"{c}*{n}")
        if self.const or not parts:
            parts.append(str(self.const))
        return "+".join(parts).replace("+-", "-")


@dataclass(frozen=True)
class Decl:
    name: str
    extents: tuple[Linear, ...]
    pos: Pos


@dataclass(frozen=True)
class Ref:
    """A connector occurrence such as ``R[i+1].p``; ``connector`` is ``"R.p"``."""

    connector: str
    indices: tuple[Linear, ...]
    pos: Pos

    def __str__(self) -> str:
        idx = f"[{','.join(str(i) for i in self.indices)}]" if self.indices else ""
        return f"{self.connector}{idx}"


@dataclass(frozen=True)
class Connect:
    left: Ref
    right: Ref
    pos: Pos


@dataclass(frozen=True)
class LoopIter:
    name: str
    lo: Linear
    hi: Linear
    pos: Pos


@dataclass(frozen=True)
class ForLoop:
    iterators: tuple[LoopIter, ...]
    body: tuple["Stmt", ...]
    pos: Pos


Stmt = Union[Connect, ForLoop]


@dataclass(frozen=True)
class ConnectModel:
    decls: tuple[Decl, ...] = ()
    statements: tuple[Stmt, ...] = ()

    def connects(self) -> Iterator[tuple[Connect, tuple[LoopIter, ...]]]:
        """Every connect statement with the iterators of its enclosing loops."""

        def walk(stmts, scope):
            for s in stmts:
                if isinstance(s, Connect):
                    yield s, scope
                else:
                    yield from walk(s.body, scope + s.iterators)

        yield from walk(self.statements, ())

    @property
    def connectors(self) -> list[str]:
        """Connector names: declared ones first, then by first use."""
        names = [d.name for d in self.decls]
        for c, _ in self.connects():
            for r in (c.left, c.right):
                if r.connector not in names:
                    names.append(r.connector)
        return names

    @property
    def parameters(self) -> set[str]:
        iters = set()
        used = set()
        for d in self.decls:
            for e in d.extents:
                used |= e.names
        for c, scope in self.connects():
            iters |= {it.name for it in scope}
            for it in scope:
                used |= it.lo.names | it.hi.names
            for r in (c.left, c.right):
                for e in r.indices:
                    used |= e.names
        return used - iters


def located(message: str, pos: Pos) -> ParseError:
    return ParseError(message, pos.line, pos.column)
