"""Recursive-descent parser for the connection language.

::

    model   ::= decl* stmt*
    decl    ::= name ("." name)? ("[" extent ("," extent)* "]")? ";"
    stmt    ::= connect | for
    connect ::= "connect" "(" ref "," ref ")" ";"
    ref     ::= name ("[" affine ("," affine)* "]")? ("." name ("[" affine ("," affine)* "]")?)?
    for     ::= "for" iter ("," iter)* "loop" stmt* "end" "for" ";"
    iter    ::= name "in" bound ":" bound

Index expressions must be affine in the loop iterators with at most one
iterator per index position; loop bounds may only use model parameters.
``//`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ParseError
from .syntax import Connect, ConnectModel, Decl, ForLoop, Linear, LoopIter, Pos, Ref, located

KEYWORDS = {"connect", "for", "in", "loop", "end"}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>//[^\n]*)"
    r"|(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[()\[\],;.:+\-*/])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: Pos


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}", line, i - line_start + 1)
        kind = m.lastgroup
        pos = Pos(line, i - line_start + 1)
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "name" and m.group() in KEYWORDS:
            tokens.append(Token("kw", m.group(), pos))
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), pos))
        i = m.end()
    tokens.append(Token("eof", "", Pos(line, i - line_start + 1)))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0
        self.scope: list[str] = []

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise located(f"expected {text!r}, found {found!r}", self.tok.pos)
        return self.advance()

    def name(self) -> Token:
        if self.tok.kind != "name":
            found = self.tok.text or "end of input"
            raise located(f"expected a name, found {found!r}", self.tok.pos)
        return self.advance()

    def parse(self) -> ConnectModel:
        decls = []
        while self.tok.kind == "name":
            decls.append(self.decl())
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.stmt())
        return ConnectModel(tuple(decls), tuple(stmts))

    def decl(self) -> Decl:
        first = self.name()
        name = first.text
        if self.at("."):
            self.advance()
            name += "." + self.name().text
        extents: tuple[Linear, ...] = ()
        if self.at("["):
            extents = self.bracketed(self.bound)
        self.expect(";")
        return Decl(name, extents, first.pos)

    def stmt(self):
        if self.at("connect"):
            return self.connect()
        if self.at("for"):
            return self.for_loop()
        found = self.tok.text or "end of input"
        raise located(f"expected 'connect' or 'for', found {found!r}", self.tok.pos)

    def connect(self) -> Connect:
        start = self.expect("connect").pos
        self.expect("(")
        left = self.ref()
        self.expect(",")
        right = self.ref()
        self.expect(")")
        self.expect(";")
        return Connect(left, right, start)

    def ref(self) -> Ref:
        first = self.name()
        name = first.text
        indices: tuple[Linear, ...] = ()
        if self.at("["):
            indices = self.bracketed(self.index)
        if self.at("."):
            self.advance()
            name += "." + self.name().text
            if self.at("["):
                if indices:
                    raise located("connector indexed twice", self.tok.pos)
                indices = self.bracketed(self.index)
        return Ref(name, indices, first.pos)

    def bracketed(self, item):
        self.expect("[")
        items = [item()]
        while self.at(","):
            self.advance()
            items.append(item())
        self.expect("]")
        return tuple(items)

    def for_loop(self) -> ForLoop:
        start = self.expect("for").pos
        iters = [self.iterator()]
        while self.at(","):
            self.advance()
            iters.append(self.iterator())
        self.expect("loop")
        names = [it.name for it in iters]
        body = []
        while not self.at("end"):
            if self.tok.kind == "eof":
                raise located("'for' loop is never closed", start)
            body.append(self.stmt())
        del self.scope[len(self.scope) - len(names):]
        self.expect("end")
        self.expect("for")
        self.expect(";")
        return ForLoop(tuple(iters), tuple(body), start)

    def iterator(self) -> LoopIter:
        tok = self.name()
        if tok.text in self.scope:
            raise located(f"iterator {tok.text!r} shadows an enclosing iterator", tok.pos)
        self.expect("in")
        lo = self.bound()
        self.expect(":")
        hi = self.bound()
        it = LoopIter(tok.text, lo, hi, tok.pos)
        # a range may not depend on any iterator, including earlier ones in this header
        self.scope.append(tok.text)
        return it

    def bound(self) -> Linear:
        pos = self.tok.pos
        e = self.expr()
        used = e.names & set(self.scope)
        if used:
            raise located(
                f"loop range depends on iterator {sorted(used)[0]!r}; iterator ranges must be independent",
                pos,
            )
        return e

    def index(self) -> Linear:
        pos = self.tok.pos
        e = self.expr()
        iters = sorted(e.names & set(self.scope))
        if len(iters) > 1:
            raise located(f"index mixes iterators {', '.join(iters)}; use one iterator per index", pos)
        for it in iters:
            if e.coef(it) < 0:
                raise located(f"negative coefficient on iterator {it!r}", pos)
        return e

    def expr(self) -> Linear:
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.advance().text
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Linear:
        e = self.unary()
        while self.at("*") or self.at("/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                if e.is_constant():
                    e = rhs.scale(e.const)
                elif rhs.is_constant():
                    e = e.scale(rhs.const)
                else:
                    raise located("non-affine expression: product of two variables", op.pos)
            else:
                if not rhs.is_constant() or rhs.const == 0:
                    raise located("division must be by a non-zero constant", op.pos)
                e = e.scale(1 / rhs.const)
        return e

    def unary(self) -> Linear:
        if self.at("-"):
            self.advance()
            return self.unary().scale(Fraction(-1))
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if self.tok.kind == "num":
            return Linear.num(int(self.advance().text))
        if self.tok.kind == "name":
            return Linear.var(self.advance().text)
        found = self.tok.text or "end of input"
        raise located(f"expected an expression, found {found!r}", self.tok.pos)


def parse(text: str) -> ConnectModel:
    return Parser(text).parse()
