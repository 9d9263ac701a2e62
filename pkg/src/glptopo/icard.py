"""Pointwise word semantics over CNF ordinals and the word-fragment decider.

A word <i1>...<ik>T is evaluated at an ordinal by splitting at the leftmost
occurrence of its minimal modality index m: the prefix C (all indices > m)
detaches as a conjunct C T and the remainder <m>B is handled directly - for
m = 0 by comparison with the least ordinal satisfying B, for m >= 1 by
shifting every index down and descending to the last CNF exponent.  Every
step is an algebra identity of the polymodal system, and the least-ordinal
recursion re-verifies each returned minimum, so the evaluator and the
minimum computation check each other.

Provability between words reduces to evaluation: A proves B exactly when
the least ordinal satisfying A satisfies B.  Conjunctions of words in
antecedents are not normalized here and are rejected with a diagnostic;
the decision surface is A -> B1 | ... | Bk.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import formula as fm
from .formula import Word
from .ordinal import ZERO, CnfOrdinal, add, cmp, ell, omega_pow

A_PROVES_DIA_B = "A_proves_dia_B"
B_PROVES_DIA_A = "B_proves_dia_A"
EQUIVALENT = "equivalent"

_min_cache: dict = {}


def _indices(w) -> tuple:
    if isinstance(w, Word):
        return w.indices
    return tuple(w)


def eval_word(w, alpha: CnfOrdinal) -> bool:
    """True iff ``alpha`` satisfies the word in the ordinal semantics."""
    return _eval(_indices(w), alpha)


def _eval(idx: tuple, alpha: CnfOrdinal) -> bool:
    if not idx:
        return True
    m = min(idx)
    if m >= 1:
        return _eval(tuple(i - 1 for i in idx), ell(alpha))
    p = idx.index(0)
    prefix, rest = idx[:p], idx[p + 1 :]
    if cmp(alpha, min_word(rest)) <= 0:
        return False
    return _eval(prefix, alpha)


def min_word(w) -> CnfOrdinal:
    """Least ordinal satisfying the word; always below epsilon_0."""
    idx = _indices(w)
    try:
        return _min_cache[idx]
    except KeyError:
        pass
    if not idx:
        result = ZERO
    else:
        m = min(idx)
        if m >= 1:
            result = omega_pow(min_word(tuple(i - 1 for i in idx)))
        else:
            p = idx.index(0)
            prefix, rest = idx[:p], idx[p + 1 :]
            down = tuple(i - 1 for i in prefix)
            result = add(min_word(rest), omega_pow(min_word(down)))
    if not _eval(idx, result):
        raise RuntimeError(
            "internal error: computed minimum %s fails its own word" % result
        )
    _min_cache[idx] = result
    return result


def word_entails(a, b) -> bool:
    """Provability of A -> B for words, decided at the least point of A."""
    return eval_word(b, min_word(a))


@dataclass(frozen=True)
class WordDecision:
    provable: bool
    refuted_at: Optional[CnfOrdinal] = None

    def to_json(self) -> dict:
        out = {"provable": self.provable}
        if self.refuted_at is not None:
            out["refuted_at"] = str(self.refuted_at)
        return out


def decide_word_implication(a, bs) -> WordDecision:
    """Decide A -> B1 | ... | Bk; reports the refuting point on failure."""
    alpha = min_word(a)
    for b in bs:
        if eval_word(b, alpha):
            return WordDecision(True)
    return WordDecision(False, alpha)


def trichotomy(a, b) -> str:
    """Exactly one of: A proves <0>B, B proves <0>A, A and B equivalent."""
    ia, ib = _indices(a), _indices(b)
    left = word_entails(ia, (0,) + ib)
    right = word_entails(ib, (0,) + ia)
    if left and right:
        raise RuntimeError("internal error: trichotomy cases overlap")
    if left:
        return A_PROVES_DIA_B
    if right:
        return B_PROVES_DIA_A
    if word_entails(ia, ib) and word_entails(ib, ia):
        return EQUIVALENT
    raise RuntimeError(
        "internal error: no trichotomy case holds for %s, %s"
        % (Word(ia), Word(ib))
    )


def as_word(phi: fm.Formula) -> Optional[tuple]:
    """Index tuple if the formula is a word, else None."""
    idx = []
    while isinstance(phi, fm.Dia):
        idx.append(phi.index)
        phi = phi.sub
    if isinstance(phi, fm.Top):
        return tuple(idx)
    return None


def eval_closed(phi: fm.Formula, alpha: CnfOrdinal) -> bool:
    """Evaluate a boolean combination of words pointwise.

    Rejects formulas outside that fragment (in particular anything with a
    variable, and modalities applied to non-words).
    """
    w = as_word(phi)
    if w is not None:
        return _eval(w, alpha)
    if isinstance(phi, fm.Bot):
        return False
    if isinstance(phi, fm.Not):
        return not eval_closed(phi.sub, alpha)
    if isinstance(phi, fm.And):
        return eval_closed(phi.lhs, alpha) and eval_closed(phi.rhs, alpha)
    if isinstance(phi, fm.Or):
        return eval_closed(phi.lhs, alpha) or eval_closed(phi.rhs, alpha)
    if isinstance(phi, fm.Imp):
        return (not eval_closed(phi.lhs, alpha)) or eval_closed(phi.rhs, alpha)
    if isinstance(phi, fm.Var):
        raise ValueError("formula is not closed: variable %r" % phi.name)
    raise ValueError(
        "formula is outside the boolean-combination-of-words fragment: %s"
        % fm.pretty(phi)
    )
