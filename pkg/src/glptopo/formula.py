"""Polymodal formulas: syntax tree, parser, printer, structural helpers.

The language has a diamond ``<n>`` and a box ``[n]`` for every natural
number n.  Boxes are stored as primitive nodes; semantic layers interpret
``[n]p`` as ``~<n>~p``.

Concrete grammar (operator precedence: unary > ``&`` > ``|`` > ``->``,
implication right-associative)::

    formula := imp
    imp     := or ("->" imp)?
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "<" nat ">" unary | "[" nat "]" unary | atom
    atom    := "T" | "F" | ident | "(" formula ")"

Identifiers match ``[a-z][a-zA-Z0-9_]*``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


class Formula:
    """Base class for formula nodes; all instances are immutable values."""

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Or(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Imp(Formula):
    lhs: Formula
    rhs: Formula


@dataclass(frozen=True)
class Dia(Formula):
    index: int
    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    index: int
    sub: Formula


TOP = Top()
BOT = Bot()

_BINARY = (And, Or, Imp)
_BINOP = {And: "&", Or: "|", Imp: "->"}


def pretty(phi: Formula) -> str:
    """Render a formula; ``parse(pretty(phi))`` is structurally ``phi``.

    Binary connectives are always parenthesized, so no precedence
    knowledge is needed to read the output back.
    """
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Bot):
        return "F"
    if isinstance(phi, Var):
        return phi.name
    if isinstance(phi, Not):
        return "~" + pretty(phi.sub)
    if isinstance(phi, Dia):
        return "<%d>%s" % (phi.index, pretty(phi.sub))
    if isinstance(phi, Box):
        return "[%d]%s" % (phi.index, pretty(phi.sub))
    if isinstance(phi, _BINARY):
        return "(%s %s %s)" % (pretty(phi.lhs), _BINOP[type(phi)], pretty(phi.rhs))
    raise TypeError("not a formula: %r" % (phi,))


# ---------------------------------------------------------------------------
# Parsing


def _tokenize(text):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "-":
            if text.startswith("->", i):
                tokens.append(("ARROW", None, i))
                i += 2
                continue
            raise ParseError("expected '->'", i)
        if c in "()|&~":
            kind = {"(": "LPAR", ")": "RPAR", "|": "OR", "&": "AND", "~": "NOT"}[c]
            tokens.append((kind, None, i))
            i += 1
            continue
        if c in "<[":
            close = ">" if c == "<" else "]"
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError("expected modality index", i + 1)
            if j >= n or text[j] != close:
                raise ParseError("expected '%s'" % close, j)
            kind = "DIA" if c == "<" else "BOX"
            tokens.append((kind, int(text[i + 1 : j]), i))
            i = j + 1
            continue
        if c == "T":
            tokens.append(("TOP", None, i))
            i += 1
            continue
        if c == "F":
            tokens.append(("BOT", None, i))
            i += 1
            continue
        if c.islower():
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("IDENT", text[i:j], i))
            i = j
            continue
        raise ParseError("unexpected character %r" % c, i)
    tokens.append(("EOF", None, n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind):
        tok = self.tokens[self.pos]
        if tok[0] != kind:
            raise ParseError("expected %s, found %s" % (kind, tok[0]), tok[2])
        self.pos += 1
        return tok

    def formula(self):
        lhs = self.disjunction()
        if self.peek()[0] == "ARROW":
            self.take("ARROW")
            return Imp(lhs, self.formula())
        return lhs

    def disjunction(self):
        f = self.conjunction()
        while self.peek()[0] == "OR":
            self.take("OR")
            f = Or(f, self.conjunction())
        return f

    def conjunction(self):
        f = self.unary()
        while self.peek()[0] == "AND":
            self.take("AND")
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, value, pos = self.peek()
        if kind == "NOT":
            self.take("NOT")
            return Not(self.unary())
        if kind == "DIA":
            self.take("DIA")
            return Dia(value, self.unary())
        if kind == "BOX":
            self.take("BOX")
            return Box(value, self.unary())
        return self.atom()

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "TOP":
            self.take("TOP")
            return TOP
        if kind == "BOT":
            self.take("BOT")
            return BOT
        if kind == "IDENT":
            self.take("IDENT")
            return Var(value)
        if kind == "LPAR":
            self.take("LPAR")
            f = self.formula()
            self.take("RPAR")
            return f
        raise ParseError("expected a formula", pos)


def parse(text: str) -> Formula:
    """Parse a formula; raises ParseError with a position on bad input."""
    p = _Parser(text)
    f = p.formula()
    p.take("EOF")
    return f


# ---------------------------------------------------------------------------
# Structural utilities


def shift_up(phi: Formula) -> Formula:
    """Increment every modality index by one."""
    if isinstance(phi, (Top, Bot, Var)):
        return phi
    if isinstance(phi, Not):
        return Not(shift_up(phi.sub))
    if isinstance(phi, Dia):
        return Dia(phi.index + 1, shift_up(phi.sub))
    if isinstance(phi, Box):
        return Box(phi.index + 1, shift_up(phi.sub))
    return type(phi)(shift_up(phi.lhs), shift_up(phi.rhs))


def shift_down(phi: Formula) -> Formula:
    """Decrement every modality index by one; all indices must be >= 1."""
    if isinstance(phi, (Top, Bot, Var)):
        return phi
    if isinstance(phi, Not):
        return Not(shift_down(phi.sub))
    if isinstance(phi, (Dia, Box)):
        if phi.index == 0:
            raise ValueError("cannot shift index 0 down")
        return type(phi)(phi.index - 1, shift_down(phi.sub))
    return type(phi)(shift_down(phi.lhs), shift_down(phi.rhs))


def is_ordered(phi: Formula) -> bool:
    """True iff no modality index is strictly smaller than an enclosing one."""

    def rec(f, ceiling):
        if isinstance(f, (Top, Bot, Var)):
            return True
        if isinstance(f, Not):
            return rec(f.sub, ceiling)
        if isinstance(f, (Dia, Box)):
            return f.index >= ceiling and rec(f.sub, f.index)
        return rec(f.lhs, ceiling) and rec(f.rhs, ceiling)

    return rec(phi, 0)


def closure(phi: Formula) -> frozenset:
    """All subformulas of ``phi``, including ``phi`` itself."""
    acc = set()

    def rec(f):
        if f in acc:
            return
        acc.add(f)
        if isinstance(f, (Not, Dia, Box)):
            rec(f.sub)
        elif isinstance(f, _BINARY):
            rec(f.lhs)
            rec(f.rhs)

    rec(phi)
    return frozenset(acc)


def size(phi: Formula) -> int:
    if isinstance(phi, (Top, Bot, Var)):
        return 1
    if isinstance(phi, (Not, Dia, Box)):
        return 1 + size(phi.sub)
    return 1 + size(phi.lhs) + size(phi.rhs)


def variables(phi: Formula) -> frozenset:
    return frozenset(f.name for f in closure(phi) if isinstance(f, Var))


def is_closed(phi: Formula) -> bool:
    """True iff the formula contains no propositional variable."""
    return not variables(phi)


def modal_indices(phi: Formula) -> frozenset:
    return frozenset(f.index for f in closure(phi) if isinstance(f, (Dia, Box)))


def neg(phi: Formula) -> Formula:
    """Negation with double negations collapsed."""
    if isinstance(phi, Not):
        return phi.sub
    if isinstance(phi, Top):
        return BOT
    if isinstance(phi, Bot):
        return TOP
    return Not(phi)


# ---------------------------------------------------------------------------
# Words: variable-free, diamond-only formulas


@dataclass(frozen=True)
class Word:
    """A formula <i1><i2>...<ik>T, kept as its index sequence.

    The empty sequence denotes T.  Indices are listed outermost first.
    """

    indices: tuple

    def __post_init__(self):
        for i in self.indices:
            if not isinstance(i, int) or i < 0:
                raise ValueError("word indices must be naturals: %r" % (self.indices,))

    def to_formula(self) -> Formula:
        f = TOP
        for i in reversed(self.indices):
            f = Dia(i, f)
        return f

    def shift_up(self) -> "Word":
        return Word(tuple(i + 1 for i in self.indices))

    def __str__(self):
        return pretty(self.to_formula())

    def __len__(self):
        return len(self.indices)

    @staticmethod
    def from_formula(phi: Formula) -> "Word":
        indices = []
        while isinstance(phi, Dia):
            indices.append(phi.index)
            phi = phi.sub
        if not isinstance(phi, Top):
            raise ValueError("not a word: %s" % pretty(phi))
        return Word(tuple(indices))


def parse_word(text: str) -> Word:
    return Word.from_formula(parse(text))


# ---------------------------------------------------------------------------
# Common axiom schemata


def box_plus(phi: Formula, index: int = 0) -> Formula:
    return And(phi, Box(index, phi))


def lob_schema(p: str = "p") -> Formula:
    """[0]([0]p -> p) -> [0]p"""
    v = Var(p)
    return Imp(Box(0, Imp(Box(0, v), v)), Box(0, v))


def lin_schema(p: str = "p", q: str = "q") -> Formula:
    """[0]([0]+p | [0]+q) -> ([0]p | [0]q)"""
    vp, vq = Var(p), Var(q)
    return Imp(Box(0, Or(box_plus(vp), box_plus(vq))), Or(Box(0, vp), Box(0, vq)))


def dot3_schema(p: str = "p", q: str = "q") -> Formula:
    """<0>p & <0>q -> <0>(p&q) | <0>(p&<0>q) | <0>(<0>p&q)"""
    vp, vq = Var(p), Var(q)
    return Imp(
        And(Dia(0, vp), Dia(0, vq)),
        Or(
            Or(Dia(0, And(vp, vq)), Dia(0, And(vp, Dia(0, vq)))),
            Dia(0, And(Dia(0, vp), vq)),
        ),
    )
