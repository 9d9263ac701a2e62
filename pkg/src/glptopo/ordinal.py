"""Ordinals below epsilon_0 in Cantor normal form.

An ordinal is zero or a strictly-decreasing sum w^{e1}*c1 + ... + w^{ek}*ck
with CnfOrdinal exponents and positive integer coefficients.  The module
provides the arithmetic needed by the d-map builder and the word-fragment
semantics: comparison, addition, left subtraction, w-powers, natural
multiples, the last-exponent function ell and its iterates, and membership
in the subbasic sets {a : ell^m(a) > b}.

Text form: terms joined by "+", each "w^{E}*c" with sugar "w" for w^{1}*1
and plain decimals for the finite part, e.g. ``w^{w}*2+w+3``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError


@dataclass(frozen=True)
class CnfOrdinal:
    """Cantor normal form; ``terms`` is a tuple of (exponent, coefficient)."""

    terms: tuple = ()

    def __post_init__(self):
        prev = None
        for exp, coeff in self.terms:
            if not isinstance(exp, CnfOrdinal):
                raise TypeError("exponent must be a CnfOrdinal: %r" % (exp,))
            if not isinstance(coeff, int) or coeff < 1:
                raise ValueError("coefficient must be a positive int: %r" % (coeff,))
            if prev is not None and cmp(prev, exp) <= 0:
                raise ValueError("exponents must strictly decrease")
            prev = exp

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero)

    def as_int(self) -> int:
        """The integer value of a finite ordinal."""
        if self.is_zero:
            return 0
        if not self.is_finite:
            raise ValueError("not a finite ordinal: %s" % self)
        return self.terms[0][1]

    @property
    def leading_exponent(self) -> "CnfOrdinal":
        if self.is_zero:
            raise ValueError("zero has no leading exponent")
        return self.terms[0][0]

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for exp, coeff in self.terms:
            if exp.is_zero:
                parts.append(str(coeff))
                continue
            base = "w" if exp == ONE else "w^{%s}" % exp
            parts.append(base if coeff == 1 else "%s*%d" % (base, coeff))
        return "+".join(parts)

    def __repr__(self):
        return "CnfOrdinal(%s)" % self

    def __lt__(self, other):
        return cmp(self, other) < 0

    def __le__(self, other):
        return cmp(self, other) <= 0

    def __gt__(self, other):
        return cmp(self, other) > 0

    def __ge__(self, other):
        return cmp(self, other) >= 0


def from_int(n: int) -> CnfOrdinal:
    if n < 0:
        raise ValueError("ordinals are non-negative")
    if n == 0:
        return ZERO
    return CnfOrdinal(((ZERO, n),))


ZERO = CnfOrdinal()
ONE = CnfOrdinal(((ZERO, 1),))
OMEGA = CnfOrdinal(((ONE, 1),))


def cmp(a: CnfOrdinal, b: CnfOrdinal) -> int:
    """-1, 0 or 1; lexicographic on the (exponent, coefficient) sequence."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = cmp(ea, eb)
        if c != 0:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    if len(a.terms) != len(b.terms):
        return -1 if len(a.terms) < len(b.terms) else 1
    return 0


def add(a: CnfOrdinal, b: CnfOrdinal) -> CnfOrdinal:
    """Ordinal sum; terms of ``a`` below the leading exponent of ``b`` vanish."""
    if b.is_zero:
        return a
    if a.is_zero:
        return b
    eb, cb = b.terms[0]
    head = []
    merged = False
    for ea, ca in a.terms:
        c = cmp(ea, eb)
        if c > 0:
            head.append((ea, ca))
        elif c == 0:
            head.append((ea, ca + cb))
            merged = True
            break
        else:
            break
    if merged:
        return CnfOrdinal(tuple(head) + b.terms[1:])
    return CnfOrdinal(tuple(head) + b.terms)


def sub_left(b: CnfOrdinal, a: CnfOrdinal) -> CnfOrdinal:
    """The unique g with add(a, g) == b; requires a <= b."""
    if a.is_zero:
        return b
    if b.is_zero or cmp(a, b) > 0:
        raise ValueError("sub_left requires a <= b (got %s > %s)" % (a, b))
    (ea, ca), (eb, cb) = a.terms[0], b.terms[0]
    c = cmp(ea, eb)
    if c < 0:
        return b  # a is absorbed wholesale
    if c > 0 or ca > cb:
        raise ValueError("sub_left requires a <= b (got %s > %s)" % (a, b))
    if ca < cb:
        return CnfOrdinal(((eb, cb - ca),) + b.terms[1:])
    return sub_left(CnfOrdinal(b.terms[1:]), CnfOrdinal(a.terms[1:]))


def omega_pow(e: CnfOrdinal) -> CnfOrdinal:
    """w^e as a single-term normal form."""
    return CnfOrdinal(((e, 1),))


def mul_nat(a: CnfOrdinal, k: int) -> CnfOrdinal:
    """a * k for a natural k (iterated sum)."""
    if k < 0:
        raise ValueError("k must be a natural number")
    if k == 0 or a.is_zero:
        return ZERO
    (e, c) = a.terms[0]
    return CnfOrdinal(((e, c * k),) + a.terms[1:])


def times_omega(q: CnfOrdinal) -> CnfOrdinal:
    """q * w = w^{e+1} where e is the leading exponent of q (q > 0)."""
    if q.is_zero:
        raise ValueError("times_omega requires a positive ordinal")
    return omega_pow(add(q.leading_exponent, ONE))


def ell(a: CnfOrdinal) -> CnfOrdinal:
    """Last CNF exponent: ell(0) = 0 and ell(g + w^b) = b."""
    if a.is_zero:
        return ZERO
    return a.terms[-1][0]


def ell_iter(a: CnfOrdinal, k: int) -> CnfOrdinal:
    for _ in range(k):
        a = ell(a)
    return a


def in_U(a: CnfOrdinal, m: int, b: CnfOrdinal) -> bool:
    """Membership in U^m_b = {a : ell^m(a) > b}."""
    return cmp(ell_iter(a, m), b) > 0


# ---------------------------------------------------------------------------
# Parsing

# Grammar: cnf := "0" | term ("+" term)*
#          term := "w" ("^{" cnf "}")? ("*" nat)? | nat
# Terms are folded with ordinal addition, so non-canonical sums like
# "1+w" are accepted and normalized.


def parse_ordinal(text: str) -> CnfOrdinal:
    value, pos = _parse_cnf(text, 0)
    pos = _skip_ws(text, pos)
    if pos != len(text):
        raise ParseError("trailing input", pos)
    return value


def _skip_ws(text, i):
    while i < len(text) and text[i].isspace():
        i += 1
    return i


def _parse_nat(text, i):
    j = i
    while j < len(text) and text[j].isdigit():
        j += 1
    if j == i:
        raise ParseError("expected a number", i)
    return int(text[i:j]), j


def _parse_term(text, i):
    i = _skip_ws(text, i)
    if i >= len(text):
        raise ParseError("expected a term", i)
    if text[i].isdigit():
        n, i = _parse_nat(text, i)
        return from_int(n), i
    if text[i] != "w":
        raise ParseError("expected 'w' or a number", i)
    i += 1
    exp = ONE
    if text.startswith("^{", i):
        exp, i = _parse_cnf(text, i + 2)
        i = _skip_ws(text, i)
        if i >= len(text) or text[i] != "}":
            raise ParseError("expected '}'", i)
        i += 1
    coeff = 1
    j = _skip_ws(text, i)
    if j < len(text) and text[j] == "*":
        coeff, i = _parse_nat(text, _skip_ws(text, j + 1))
    return mul_nat(omega_pow(exp), coeff), i


def _parse_cnf(text, i):
    i = _skip_ws(text, i)
    if i < len(text) and text[i] == "0":
        return ZERO, i + 1
    total, i = _parse_term(text, i)
    while True:
        j = _skip_ws(text, i)
        if j < len(text) and text[j] == "+":
            term, i = _parse_term(text, j + 1)
            total = add(total, term)
        else:
            return total, i
