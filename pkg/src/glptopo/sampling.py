"""Deterministic random generators shared by the self-test and the suite."""

from __future__ import annotations

import functools
import random

from . import formula as fm
from .ordinal import ZERO, CnfOrdinal, cmp, from_int, mul_nat, omega_pow, add
from .space import FiniteSpace


def random_formula(rng: random.Random, n_vars: int = 3, depth: int = 3,
                   max_index: int = 0) -> fm.Formula:
    """A random formula with modal depth at most ``depth``."""
    names = ["p", "q", "r", "s"][: max(1, n_vars)]
    leaves = [fm.TOP, fm.BOT] + [fm.Var(v) for v in names]

    def gen(d):
        if d == 0 or rng.random() < 0.25:
            return rng.choice(leaves)
        kind = rng.randrange(6)
        if kind == 0:
            return fm.Not(gen(d - 1))
        if kind == 1:
            return fm.Dia(rng.randint(0, max_index), gen(d - 1))
        if kind == 2:
            return fm.Box(rng.randint(0, max_index), gen(d - 1))
        ctor = (fm.And, fm.Or, fm.Imp)[kind - 3]
        return ctor(gen(d - 1), gen(d - 1))

    return gen(depth)


def random_cnf(rng: random.Random, depth: int = 2, max_terms: int = 3,
               max_coeff: int = 4) -> CnfOrdinal:
    """A random ordinal below epsilon_0 with exponent nesting ``depth``."""
    if depth == 0 or rng.random() < 0.3:
        return from_int(rng.randrange(0, max_coeff + 1))
    exps = []
    for _ in range(rng.randint(1, max_terms)):
        e = random_cnf(rng, depth - 1, max_terms, max_coeff)
        if all(cmp(e, seen) != 0 for seen in exps):
            exps.append(e)
    exps.sort(key=functools.cmp_to_key(cmp), reverse=True)
    out = ZERO
    for e in exps:
        out = add(out, mul_nat(omega_pow(e), rng.randint(1, max_coeff)))
    return out


def random_space(rng: random.Random, n: int) -> FiniteSpace:
    """A random topology generated from a random subbase."""
    k = rng.randint(1, 2 * n)
    sets = [rng.getrandbits(n) for _ in range(k)]
    return FiniteSpace.from_subbase(n, sets)


def random_scattered_space(rng: random.Random, n: int, tries: int = 200) -> FiniteSpace:
    """A random scattered topology (rejection sampling over subbases)."""
    for _ in range(tries):
        space = random_space(rng, n)
        if space.cb_sequence()[-1] == 0:
            return space
    raise RuntimeError("could not sample a scattered space on %d points" % n)


def random_word(rng: random.Random, max_len: int = 5, max_index: int = 2) -> tuple:
    return tuple(rng.randint(0, max_index) for _ in range(rng.randint(0, max_len)))
