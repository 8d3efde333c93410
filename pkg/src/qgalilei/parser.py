"""Case-file tokenizer, expression parser and renderer.

Precedence, loosest first:  + -   then  @   then  *   then  ^ .
A leading minus is allowed on any summand.  ``^`` accepts negative integer
exponents; evaluation restricts those to parameter scalars.  Functions:
exp, log1p, inv1p, cosh, sinh (series) and sqrt (parameter scalars only).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import CaseSyntaxError, UnknownSymbol

FNS = ("exp", "log1p", "inv1p", "cosh", "sinh", "sqrt")


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Add:
    items: tuple


@dataclass(frozen=True)
class Mul:
    factors: tuple


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Fn:
    name: str
    arg: object


@dataclass(frozen=True)
class Tensor:
    slots: tuple


# -- tokenizer ------------------------------------------------------------------

class _Tok:
    __slots__ = ("kind", "text", "col")

    def __init__(self, kind, text, col):
        self.kind = kind
        self.text = text
        self.col = col


def _tokenize(s: str, line: int):
    toks = []
    i, n = 0, len(s)
    while i < n:
        ch = s[i]
        if ch in " \t":
            i += 1
            continue
        col = i + 1
        if ch.isdigit():
            j = i
            while j < n and s[j].isdigit():
                j += 1
            if j < n and s[j] == "/" and j + 1 < n and s[j + 1].isdigit():
                k = j + 1
                while k < n and s[k].isdigit():
                    k += 1
                toks.append(_Tok("num", s[i:k], col))
                i = k
            else:
                toks.append(_Tok("num", s[i:j], col))
                i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (s[j].isalnum() or s[j] == "_"):
                j += 1
            toks.append(_Tok("name", s[i:j], col))
            i = j
            continue
        if ch in "+-*@^()":
            toks.append(_Tok(ch, ch, col))
            i += 1
            continue
        raise CaseSyntaxError(f"unexpected character {ch!r}", line, col)
    toks.append(_Tok("end", "", n + 1))
    return toks


class ExprParser:
    def __init__(self, text: str, line: int, params=(), gens=()):
        self.toks = _tokenize(text, line)
        self.pos = 0
        self.line = line
        self.params = set(params)
        self.gens = set(gens)

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        t = self.toks[self.pos]
        if kind is not None and t.kind != kind:
            raise CaseSyntaxError(
                f"expected {kind!r}, found {t.text or 'end of line'!r}",
                self.line, t.col)
        self.pos += 1
        return t

    def parse(self):
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise CaseSyntaxError(f"trailing input {t.text!r}", self.line, t.col)
        return e

    def expr(self):
        items = []
        neg = False
        t = self.peek()
        if t.kind in ("+", "-"):
            self.take()
            neg = t.kind == "-"
        first = self.tensorterm()
        items.append(Neg(first) if neg else first)
        while self.peek().kind in ("+", "-"):
            op = self.take().kind
            term = self.tensorterm()
            items.append(Neg(term) if op == "-" else term)
        return items[0] if len(items) == 1 else Add(tuple(items))

    def tensorterm(self):
        slots = [self.prod()]
        while self.peek().kind == "@":
            self.take()
            slots.append(self.prod())
        return slots[0] if len(slots) == 1 else Tensor(tuple(slots))

    def prod(self):
        factors = [self.factor()]
        while self.peek().kind == "*":
            self.take()
            factors.append(self.factor())
        return factors[0] if len(factors) == 1 else Mul(tuple(factors))

    def factor(self):
        base = self.atom()
        if self.peek().kind == "^":
            self.take()
            sign = 1
            if self.peek().kind == "-":
                self.take()
                sign = -1
            t = self.take("num")
            if "/" in t.text:
                raise CaseSyntaxError("exponent must be an integer", self.line, t.col)
            return Pow(base, sign * int(t.text))
        return base

    def atom(self):
        t = self.peek()
        if t.kind == "num":
            self.take()
            return Num(Fraction(t.text))
        if t.kind == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if t.kind == "name":
            self.take()
            name = t.text
            if name == "i":
                return Imag()
            if name in FNS:
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Fn(name, arg)
            if self.params or self.gens:
                if name not in self.params and name not in self.gens:
                    raise UnknownSymbol(f"unknown symbol {name!r}", self.line, t.col)
            return Sym(name)
        raise CaseSyntaxError(
            f"expected a value, found {t.text or 'end of line'!r}", self.line, t.col)


def parse_expr(text, line=1, params=(), gens=()):
    return ExprParser(text, line, params, gens).parse()


# -- renderer -------------------------------------------------------------------

def render_expr(node) -> str:
    return _render(node, 0)


# precedence levels: 0 sum, 1 tensor, 2 product, 3 power/atom
def _render(node, level) -> str:
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, Sym):
        return node.name
    if isinstance(node, Fn):
        return f"{node.name}({_render(node.arg, 0)})"
    if isinstance(node, Pow):
        b = _render(node.base, 3)
        if not isinstance(node.base, (Num, Imag, Sym, Fn)):
            b = f"({b})"
        return f"{b}^{node.exp}"
    if isinstance(node, Mul):
        s = "*".join(_render(f, 2) for f in node.factors)
        return f"({s})" if level > 2 else s
    if isinstance(node, Tensor):
        s = "@".join(_render(f, 2) for f in node.slots)
        return f"({s})" if level > 1 else s
    if isinstance(node, Neg):
        inner = _render(node.arg, 1 if isinstance(node.arg, Tensor) else 2)
        s = f"-{inner}"
        return f"({s})" if level > 0 else s
    if isinstance(node, Add):
        bits = []
        for it in node.items:
            if isinstance(it, Neg):
                bits.append(("-", _render(it.arg, 1)))
            else:
                bits.append(("+", _render(it, 1)))
        s = bits[0][1] if bits[0][0] == "+" else f"-{bits[0][1]}"
        for sign, b in bits[1:]:
            s += f" {sign} {b}"
        return f"({s})" if level > 0 else s
    raise TypeError(f"not an expression node: {node!r}")


def walk(node):
    yield node
    for child in _children(node):
        yield from walk(child)


def _children(node):
    if isinstance(node, Neg):
        return (node.arg,)
    if isinstance(node, Add):
        return node.items
    if isinstance(node, Mul):
        return node.factors
    if isinstance(node, Tensor):
        return node.slots
    if isinstance(node, Pow):
        return (node.base,)
    if isinstance(node, Fn):
        return (node.arg,)
    return ()


def symbols_used(node):
    return {n.name for n in walk(node) if isinstance(n, Sym)}
