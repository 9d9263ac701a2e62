"""Condensed invariant suites behind the CLI ``selftest`` verb.

Each suite samples deterministically from a seed and returns (name, ok,
detail).  The full property suite lives in the test tree; this module keeps
a fast, dependency-light subset runnable from an installed package.
"""

from __future__ import annotations

import random

from . import formula as fm
from . import icard
from . import kripke as kr
from . import sampling
from . import space as sp
from .dmap import build_dmap
from .ordinal import ZERO, add, cmp, ell, from_int, omega_pow, sub_left


def _suite_formula(rng, samples):
    for _ in range(samples):
        phi = sampling.random_formula(rng, n_vars=3, depth=4, max_index=2)
        if fm.parse(fm.pretty(phi)) != phi:
            return False, "round trip failed for %s" % fm.pretty(phi)
        up = fm.shift_up(phi)
        if fm.is_ordered(phi) != fm.is_ordered(up):
            return False, "shift_up changed orderedness of %s" % fm.pretty(phi)
    return True, "%d round trips" % samples


def _suite_ordinal(rng, samples):
    for _ in range(samples):
        a = sampling.random_cnf(rng)
        b = sampling.random_cnf(rng)
        g = sampling.random_cnf(rng)
        if cmp(add(add(a, b), g), add(a, add(b, g))) != 0:
            return False, "associativity failed"
        if cmp(a, b) <= 0 and cmp(add(a, sub_left(b, a)), b) != 0:
            return False, "sub_left round trip failed"
        if cmp(ell(add(g, omega_pow(b))), b) != 0:
            return False, "ell(g + w^b) != b"
    return True, "%d algebra samples" % samples


def _suite_space(rng, samples):
    spaces = list(sp.enumerate_topologies(3))
    for n in (4, 5, 6):
        spaces.extend(sampling.random_space(rng, n) for _ in range(samples // 3 + 1))
    for space in spaces:
        rep = space.classify()
        if rep.scattered != rep.magari:
            return False, "scattered/Magari mismatch on %r" % space
        if rep.scattered and not rep.t_d:
            return False, "scattered space not T_d: %r" % space
        plus = space.plus_topology()
        if not all(plus.is_closed(1 << x) for x in range(space.n)):
            return False, "plus topology not T1 on %r" % space
        if rep.scattered:
            dx = space.derivative(space.full)
            if dx and space.is_open(dx):
                return False, "d(X) open on scattered %r" % space
        lin = sp.validates([space], fm.lin_schema())
        if lin.valid != rep.primal:
            return False, "(lin)/primal mismatch on %r" % space
    return True, "%d spaces" % len(spaces)


def _suite_gl(rng, samples):
    if not kr.gl_decide(fm.lob_schema()).provable:
        return False, "Lob axiom not provable"
    trans = fm.parse("<0><0>p -> <0>p")
    if not kr.gl_decide(trans).provable:
        return False, "transitivity not provable"
    for text in ("<0>T", "p -> [0]p"):
        v = kr.gl_decide(fm.parse(text))
        if v.provable:
            return False, "%s wrongly provable" % text
    dot3 = fm.dot3_schema()
    if kr.gl_decide(dot3).provable:
        return False, "(.3) wrongly GL-provable"
    if not kr.gl3_decide(dot3).provable:
        return False, "(.3) not GL.3-provable"
    trees = kr.enumerate_trees(4)
    for _ in range(samples):
        phi = sampling.random_formula(rng, n_vars=2, depth=2)
        t = rng.choice(trees)
        valuation = {v: rng.getrandbits(t.n) for v in fm.variables(phi)}
        via_tree = kr.model_check_tree(t, valuation, phi)
        via_space = sp.model_check([t.to_space()], valuation, phi)
        if via_tree != via_space:
            return False, "evaluator mismatch on %s" % fm.pretty(phi)
    return True, "verdicts and %d dual evaluations" % samples


def _suite_dmap(rng, samples):
    for t in kr.enumerate_trees(4):
        f = build_dmap(t)
        h = t.height
        expected = add(omega_pow(from_int(h)), from_int(1)) if t.n > 1 else from_int(1)
        if cmp(f.dom, expected) != 0:
            return False, "domain mismatch for %r" % (t.parent,)
        heights = t.node_heights()
        for node in range(t.n):
            xi = f.least_preimage(node)
            if cmp(ell(xi), from_int(heights[node])) != 0:
                return False, "rank composition failed at node %d" % node
    f = build_dmap(kr.fork(3))
    for k in range(30):
        if f.apply(from_int(k)) != 1 + (k % 3):
            return False, "fork law failed at %d" % k
    return True, "trees up to 4 nodes"


def _suite_icard(rng, samples):
    if cmp(icard.min_word((1,)), omega_pow(from_int(1))) != 0:
        return False, "min <1>T is not w"
    if cmp(icard.min_word((2,)), omega_pow(omega_pow(from_int(1)))) != 0:
        return False, "min <2>T is not w^w"
    for _ in range(samples):
        w = sampling.random_word(rng)
        alpha = sampling.random_cnf(rng)
        up = tuple(i + 1 for i in w)
        if icard.eval_word(up, alpha) != icard.eval_word(w, ell(alpha)):
            return False, "shift lemma failed for %s" % (w,)
    for a in range(5):
        for b in range(5):
            lhs = icard.word_entails((0,) * a, (0,) * b)
            rhs = kr.gl_decide(
                fm.Imp(fm.Word((0,) * a).to_formula(), fm.Word((0,) * b).to_formula())
            ).provable
            if lhs != rhs:
                return False, "GL cross-oracle failed at %d,%d" % (a, b)
    return True, "%d shift samples + GL cross-oracle" % samples


SUITES = (
    ("formula", _suite_formula),
    ("ordinal", _suite_ordinal),
    ("space", _suite_space),
    ("gl", _suite_gl),
    ("dmap", _suite_dmap),
    ("icard", _suite_icard),
)


def run_selftest(seed: int = 0, samples: int = 100):
    """Run all suites; returns a list of (name, ok, detail)."""
    results = []
    for i, (name, suite) in enumerate(SUITES):
        rng = random.Random((seed << 8) + i)
        try:
            ok, detail = suite(rng, samples)
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, "raised %s: %s" % (type(exc).__name__, exc)
        results.append((name, ok, detail))
    return results
