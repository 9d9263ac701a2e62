"""Surjective d-maps from ordinal intervals onto finite trees.

For a tree of height h the builder produces a recursive description of the
classical map from [0, w^h] onto the tree: below the top point the domains
of the root's child subtrees repeat cyclically, and the top point covers
the root.  For an n-fork this is exactly x |-> leaf (x mod n) with the
limit point going to the root.  Evaluation at a CNF ordinal locates the
enclosing block by bounded division against the cycle sum, never by
unbounded iteration.

The map cannot be checked globally (its domain is infinite); its defining
invariants - rank composition ell(x) = height(f(x)), surjectivity via
least preimages, and the fork law - are sampled extensively in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from . import formula as fm
from . import kripke as kr
from . import space as sp
from .ordinal import (
    ZERO,
    ONE,
    CnfOrdinal,
    add,
    cmp,
    ell,
    from_int,
    mul_nat,
    omega_pow,
    sub_left,
    times_omega,
)


@dataclass(frozen=True)
class _Leaf:
    node: int

    @property
    def dom(self) -> CnfOrdinal:
        return ONE


@dataclass(frozen=True)
class _Inner:
    root: int
    children: tuple  # of _Leaf/_Inner
    node_sets: tuple  # frozenset of tree nodes per child
    cycle: CnfOrdinal  # sum of the child domains
    top: CnfOrdinal  # times_omega(cycle); the preimage of the root

    @property
    def dom(self) -> CnfOrdinal:
        return add(self.top, ONE)


@dataclass(frozen=True)
class SymbolicDMap:
    """Onto d-map from [0, dom) with the order topology onto a tree."""

    tree: kr.Tree
    structure: Union[_Leaf, _Inner]

    @property
    def dom(self) -> CnfOrdinal:
        return self.structure.dom

    def apply(self, xi: CnfOrdinal) -> int:
        return _apply(self.structure, xi)

    def least_preimage(self, node: int) -> CnfOrdinal:
        if not 0 <= node < self.tree.n:
            raise ValueError("node %r is not in the tree" % (node,))
        xi = _least_preimage(self.structure, node)
        if _apply(self.structure, xi) != node:
            raise RuntimeError("internal error: least preimage failed verification")
        return xi

    def to_json(self) -> dict:
        return {
            "tree": self.tree.to_json(),
            "dom": str(self.dom),
            "height": self.tree.height,
        }


def build_dmap(t: kr.Tree) -> SymbolicDMap:
    """Construct the canonical d-map onto ``t`` by root pruning."""
    desc_masks = t.descendant_masks()

    def build(node):
        kids = t.children(node)
        if not kids:
            return _Leaf(node)
        children = tuple(build(c) for c in kids)
        node_sets = []
        for c in kids:
            desc = desc_masks[c] | (1 << c)
            node_sets.append(frozenset(sp.points(desc)))
        cycle = ZERO
        for ch in children:
            cycle = add(cycle, ch.dom)
        return _Inner(
            root=node,
            children=children,
            node_sets=tuple(node_sets),
            cycle=cycle,
            top=times_omega(cycle),
        )

    return SymbolicDMap(t, build(t.root))


def _apply(struct, xi: CnfOrdinal) -> int:
    if isinstance(struct, _Leaf):
        if not xi.is_zero:
            raise ValueError("point %s outside the domain" % xi)
        return struct.node
    if cmp(xi, struct.top) > 0:
        raise ValueError("point %s outside the domain [0, %s]" % (xi, struct.top))
    if cmp(xi, struct.top) == 0:
        return struct.root
    q = struct.cycle
    # Number of full cycles below xi: bounded division by the cycle sum.
    if cmp(xi, q) < 0:
        m = 0
    else:
        e, c = q.terms[0]
        d = xi.terms[0][1]  # xi >= q forces equal leading exponents
        m = d // c
        if cmp(mul_nat(q, m), xi) > 0:
            m -= 1
    offset = sub_left(xi, mul_nat(q, m))
    for child in struct.children:
        if cmp(offset, child.dom) < 0:
            return _apply(child, offset)
        offset = sub_left(offset, child.dom)
    raise RuntimeError("internal error: block walk left the cycle")


def _least_preimage(struct, node: int) -> CnfOrdinal:
    if isinstance(struct, _Leaf):
        if node != struct.node:
            raise ValueError("node %r is not in this subtree" % (node,))
        return ZERO
    if node == struct.root:
        return struct.top
    start = ZERO
    for child, nodes in zip(struct.children, struct.node_sets):
        if node in nodes:
            return add(start, _least_preimage(child, node))
        start = add(start, child.dom)
    raise ValueError("node %r is not in this subtree" % (node,))


def sample_domain(f: SymbolicDMap, rng, count: int = 1000):
    """Boundary-heavy domain points for sampled verification.

    Includes 0, the top point, the block-boundary partial sums of the first
    cycles with small offsets, the w-powers up to the height, and random
    points built by descending the block structure (so arbitrarily large
    finite cycle indices occur).
    """
    struct = f.structure
    out = [ZERO]
    if isinstance(struct, _Inner):
        out.append(struct.top)
        k = len(struct.children)
        s = ZERO
        for i in range(2 * k + 3):
            child = struct.children[i % k]
            for off in (ZERO, ONE, add(ONE, ONE)):
                xi = add(s, off)
                if cmp(xi, struct.top) < 0:
                    out.append(xi)
            s = add(s, child.dom)
        for j in range(f.tree.height + 1):
            out.append(omega_pow(from_int(j)))
    while len(out) < count:
        out.append(_random_point(struct, rng))
    return out


def _random_point(struct, rng):
    if isinstance(struct, _Leaf):
        return ZERO
    if rng.random() < 0.05:
        return struct.top
    m = rng.randint(0, 40) if rng.random() < 0.8 else rng.randint(0, 10**9)
    xi = mul_nat(struct.cycle, m)
    stop = rng.randrange(len(struct.children))
    for child in struct.children[:stop]:
        xi = add(xi, child.dom)
    return add(xi, _random_point(struct.children[stop], rng))


def cycle_domain(child_doms) -> tuple:
    """(cycle sum Q, domain Q*w + 1) of blocks repeating along omega.

    This is the ordinal d-sum of the given domains along w+1: the blocks
    fill the isolated points of [0, w] and the limit point remains.
    """
    q = ZERO
    for d in child_doms:
        q = add(q, d)
    if q.is_zero:
        raise ValueError("need at least one nonempty block")
    return q, add(times_omega(q), ONE)


# ---------------------------------------------------------------------------
# Refuting GL non-theorems on an ordinal


@dataclass(frozen=True)
class OrdinalRefutation:
    """A GL non-theorem refuted at a concrete ordinal below w^w.

    The valuation is the pullback f^{-1}(v) of the tree countermodel's
    valuation, described by node sets.
    """

    phi: fm.Formula
    dmap: SymbolicDMap
    point: CnfOrdinal
    node: int
    valuation: dict

    def to_json(self) -> dict:
        return {
            "formula": fm.pretty(self.phi),
            "tree": self.dmap.tree.to_json(),
            "dom": str(self.dmap.dom),
            "point": str(self.point),
            "node": self.node,
            "valuation": {k: list(sp.points(v)) for k, v in self.valuation.items()},
        }


def refute_on_ordinal(phi: fm.Formula) -> Optional[OrdinalRefutation]:
    """Pull a tree countermodel of ``phi`` back along the constructed d-map.

    Returns None when phi is GL-provable.  The refuting point is the least
    preimage of the refuting tree node; d-maps reflect satisfiability, so
    phi fails there under the pulled-back valuation.
    """
    verdict = kr.gl_decide(phi)
    if verdict.provable:
        return None
    cm = verdict.countermodel
    f = build_dmap(cm.tree)
    xi = f.least_preimage(cm.node)
    heights = cm.tree.node_heights()
    if not f.dom.leading_exponent.is_finite:
        raise RuntimeError("internal error: domain not below w^w")
    if cmp(ell(xi), from_int(heights[cm.node])) != 0:
        raise RuntimeError("internal error: rank composition failed at %s" % xi)
    return OrdinalRefutation(
        phi=phi, dmap=f, point=xi, node=cm.node, valuation=dict(cm.valuation)
    )
