"""Finite irreflexive trees: GL and GL.3 decision procedures with verified
countermodels, an independent Kripke evaluator, and the recursive tree
calculus (point, fork, d-sum).

The GL decider searches for a tree countermodel with a tableau that expands
diamond demands into child worlds.  Each child inherits the parent's box
commitments (transitivity) plus a fresh blocker [0]~d for the demand d it
discharges, so the commitment set grows strictly along every branch and the
search terminates.  Countermodels are re-checked by the evaluator before
they are returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import formula as fm
from . import space as sp


@dataclass(frozen=True)
class Tree:
    """Finite rooted tree on nodes 0..n-1 given by the parent map."""

    parent: tuple

    def __post_init__(self):
        roots = [i for i, p in enumerate(self.parent) if p is None]
        if len(roots) != 1:
            raise ValueError("tree must have exactly one root")
        n = len(self.parent)
        for i, p in enumerate(self.parent):
            if p is None:
                continue
            if not 0 <= p < n:
                raise ValueError("parent index out of range at node %d" % i)
            seen = {i}
            cur = p
            while cur is not None:
                if cur in seen:
                    raise ValueError("parent links contain a cycle at node %d" % i)
                seen.add(cur)
                cur = self.parent[cur]

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def root(self) -> int:
        return next(i for i, p in enumerate(self.parent) if p is None)

    def children(self, x: int) -> tuple:
        return tuple(i for i, p in enumerate(self.parent) if p == x)

    def leaves(self) -> tuple:
        withkids = set(p for p in self.parent if p is not None)
        return tuple(i for i in range(self.n) if i not in withkids)

    def descendant_masks(self) -> tuple:
        """Mask of proper descendants per node."""
        desc = [0] * self.n
        for order in self._postorder():
            for c in self.children(order):
                desc[order] |= desc[c] | (1 << c)
        return tuple(desc)

    def _postorder(self):
        out, stack = [], [self.root]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children(x))
        return reversed(out)

    def node_heights(self) -> tuple:
        h = [0] * self.n
        for x in self._postorder():
            kids = self.children(x)
            if kids:
                h[x] = 1 + max(h[c] for c in kids)
        return tuple(h)

    @property
    def height(self) -> int:
        return self.node_heights()[self.root]

    def to_space(self) -> sp.FiniteSpace:
        """Upset topology of the proper-descendant order."""
        desc = self.descendant_masks()
        pairs = []
        for x in range(self.n):
            for y in sp.points(desc[x]):
                pairs.append((x, y))
        return sp.FiniteSpace.from_order(pairs, mode="upset", n=self.n)

    def to_json(self) -> dict:
        return {"parent": list(self.parent)}

    @staticmethod
    def from_json(data: dict) -> "Tree":
        return Tree(tuple(data["parent"]))


def point() -> Tree:
    return Tree((None,))


def fork(n: int) -> Tree:
    """Root 0 with n leaf children 1..n."""
    if n < 1:
        raise ValueError("fork needs at least one prong")
    return Tree((None,) + (0,) * n)


def chain(k: int) -> Tree:
    """A path of k nodes; node i+1 above node i."""
    if k < 1:
        raise ValueError("chain needs at least one node")
    return Tree((None,) + tuple(range(k - 1)))


def tree_dsum(base: Tree, plugins: dict) -> Tree:
    """Replace keyed leaves of ``base`` with the plugged trees.

    Node blocks follow base-node order, matching FiniteSpace.dsum, so the
    upset space of the result equals the d-sum of the component spaces.
    """
    leaves = set(base.leaves())
    for j in plugins:
        if j not in leaves:
            raise ValueError("node %d is not a leaf of the base tree" % j)
    sizes = [plugins[j].n if j in plugins else 1 for j in range(base.n)]
    offsets = [0] * base.n
    acc = 0
    for j in range(base.n):
        offsets[j] = acc
        acc += sizes[j]
    parent = [None] * acc

    def new_id(j):
        # Representative of base node j: the plug root if j was replaced.
        if j in plugins:
            return offsets[j] + plugins[j].root
        return offsets[j]

    for j in range(base.n):
        if j in plugins:
            t = plugins[j]
            for z in range(t.n):
                if t.parent[z] is None:
                    bp = base.parent[j]
                    parent[offsets[j] + z] = None if bp is None else new_id(bp)
                else:
                    parent[offsets[j] + z] = offsets[j] + t.parent[z]
        else:
            bp = base.parent[j]
            parent[offsets[j]] = None if bp is None else new_id(bp)
    return Tree(tuple(parent))


def canonical_form(t: Tree):
    """Shape of a rooted tree as nested sorted tuples (isomorphism key)."""

    def rec(x):
        return tuple(sorted(rec(c) for c in t.children(x)))

    return rec(t.root)


def enumerate_trees(max_nodes: int):
    """All rooted trees with 1..max_nodes nodes, one per isomorphism class."""
    shapes = {1: [()]}
    for n in range(2, max_nodes + 1):
        found = set()
        # Root with a multiset of child subtrees totalling n-1 nodes.
        def extend(remaining, smallest_allowed, acc):
            if remaining == 0:
                found.add(tuple(sorted(acc)))
                return
            for k in range(1, remaining + 1):
                for shape in shapes[k]:
                    key = (k, shape)
                    if key < smallest_allowed:
                        continue
                    extend(remaining - k, key, acc + [shape])

        extend(n - 1, (0, ()), [])
        shapes[n] = sorted(found)
    out = []
    for n in range(1, max_nodes + 1):
        for shape in shapes[n]:
            out.append(tree_from_shape(shape))
    return out


def tree_from_shape(shape) -> Tree:
    parent = [None]

    def build(children, at):
        for child in children:
            parent.append(at)
            build(child, len(parent) - 1)

    build(shape, 0)
    return Tree(tuple(parent))


# ---------------------------------------------------------------------------
# Kripke evaluation (independent of the topological evaluator)


def model_check_tree(t: Tree, valuation: dict, phi: fm.Formula) -> int:
    """Truth set of a single-modality formula over the descendant relation."""
    desc = t.descendant_masks()
    full = (1 << t.n) - 1

    def ev(f):
        if isinstance(f, fm.Top):
            return full
        if isinstance(f, fm.Bot):
            return 0
        if isinstance(f, fm.Var):
            if f.name not in valuation:
                raise ValueError("unvalued variable %r" % f.name)
            return valuation[f.name]
        if isinstance(f, fm.Not):
            return full & ~ev(f.sub)
        if isinstance(f, fm.And):
            return ev(f.lhs) & ev(f.rhs)
        if isinstance(f, fm.Or):
            return ev(f.lhs) | ev(f.rhs)
        if isinstance(f, fm.Imp):
            return (full & ~ev(f.lhs)) | ev(f.rhs)
        if isinstance(f, (fm.Dia, fm.Box)):
            if f.index != 0:
                raise ValueError("tree models are single-modality (index 0)")
            s = ev(f.sub)
            out = 0
            for x in range(t.n):
                hit = desc[x] & s
                if isinstance(f, fm.Dia):
                    if hit:
                        out |= 1 << x
                else:
                    if not desc[x] & ~s:
                        out |= 1 << x
            return out
        raise TypeError("not a formula: %r" % (f,))

    return ev(phi)


# ---------------------------------------------------------------------------
# GL decision procedure


@dataclass(frozen=True)
class Countermodel:
    tree: Tree
    valuation: dict
    node: int

    def to_json(self):
        return {
            "tree": self.tree.to_json(),
            "valuation": {k: list(sp.points(v)) for k, v in self.valuation.items()},
            "node": self.node,
        }


@dataclass(frozen=True)
class GlVerdict:
    provable: bool
    countermodel: Optional[Countermodel] = None

    def to_json(self):
        out = {"provable": self.provable}
        if self.countermodel is not None:
            out["countermodel"] = self.countermodel.to_json()
        return out


class _World:
    __slots__ = ("varassign", "children")

    def __init__(self, varassign, children):
        self.varassign = varassign
        self.children = children


def _require_single_modality(phi):
    bad = [i for i in fm.modal_indices(phi) if i != 0]
    if bad:
        raise ValueError("only modality 0 is allowed here (found %s)" % sorted(bad))


def _branches(pending, lits):
    """Saturate boolean structure; yield consistent literal assignments.

    ``lits`` maps Var/Dia/Box nodes to booleans.
    """
    pending = list(pending)
    lits = dict(lits)
    while pending:
        f, want = pending.pop()
        if isinstance(f, fm.Top):
            if not want:
                return
        elif isinstance(f, fm.Bot):
            if want:
                return
        elif isinstance(f, fm.Not):
            pending.append((f.sub, not want))
        elif isinstance(f, fm.And):
            if want:
                pending.append((f.lhs, True))
                pending.append((f.rhs, True))
            else:
                yield from _branches(pending + [(f.lhs, False)], lits)
                yield from _branches(pending + [(f.rhs, False)], lits)
                return
        elif isinstance(f, fm.Or):
            if want:
                yield from _branches(pending + [(f.lhs, True)], lits)
                yield from _branches(pending + [(f.rhs, True)], lits)
                return
            pending.append((f.lhs, False))
            pending.append((f.rhs, False))
        elif isinstance(f, fm.Imp):
            if want:
                yield from _branches(pending + [(f.lhs, False)], lits)
                yield from _branches(pending + [(f.rhs, True)], lits)
                return
            pending.append((f.lhs, True))
            pending.append((f.rhs, False))
        else:
            if f in lits:
                if lits[f] != want:
                    return
            else:
                lits[f] = want
    yield lits


def _solve(constraints) -> Optional[_World]:
    """Find a GL tree model whose root satisfies the signed constraints."""
    for lits in _branches(constraints, {}):
        demands = []
        commits = []
        varassign = {}
        for f, val in lits.items():
            if isinstance(f, fm.Var):
                varassign[f.name] = val
            elif isinstance(f, fm.Dia):
                (demands if val else commits).append(
                    f.sub if val else fm.neg(f.sub)
                )
            elif isinstance(f, fm.Box):
                (commits if val else demands).append(
                    f.sub if val else fm.neg(f.sub)
                )
        children = []
        stuck = False
        for d in demands:
            child = [(d, True), (fm.Box(0, fm.neg(d)), True)]
            for c in commits:
                child.append((c, True))
                child.append((fm.Box(0, c), True))
            m = _solve(child)
            if m is None:
                stuck = True
                break
            children.append(m)
        if not stuck:
            return _World(varassign, children)
    return None


def _assemble(world: _World, names) -> tuple:
    parent = []
    assigns = []

    def build(w, par):
        parent.append(par)
        assigns.append(w.varassign)
        me = len(parent) - 1
        for c in w.children:
            build(c, me)

    build(world, None)
    tree = Tree(tuple(parent))
    valuation = {
        name: sp.mask(i for i, a in enumerate(assigns) if a.get(name, False))
        for name in names
    }
    return tree, valuation


def _minimize(tree: Tree, valuation: dict, phi: fm.Formula) -> tuple:
    """Greedily drop leaves while the root still refutes phi."""
    while True:
        dropped = False
        for leaf in tree.leaves():
            if leaf == tree.root:
                continue
            keep = [i for i in range(tree.n) if i != leaf]
            renum = {old: new for new, old in enumerate(keep)}
            cand = Tree(
                tuple(
                    None if tree.parent[old] is None else renum[tree.parent[old]]
                    for old in keep
                )
            )
            cand_val = {
                name: sp.mask(renum[i] for i in sp.points(v) if i != leaf)
                for name, v in valuation.items()
            }
            if not model_check_tree(cand, cand_val, phi) >> renum[tree.root] & 1:
                tree, valuation = cand, cand_val
                dropped = True
                break
        if not dropped:
            return tree, valuation


def gl_decide(phi: fm.Formula) -> GlVerdict:
    """Decide GL-provability; refutations carry a verified tree countermodel."""
    _require_single_modality(phi)
    world = _solve([(phi, False)])
    if world is None:
        return GlVerdict(True)
    names = sorted(fm.variables(phi))
    tree, valuation = _assemble(world, names)
    if model_check_tree(tree, valuation, phi) >> tree.root & 1:
        raise RuntimeError("internal error: countermodel failed verification")
    tree, valuation = _minimize(tree, valuation, phi)
    return GlVerdict(False, Countermodel(tree, valuation, tree.root))


def gl_satisfiable(phi: fm.Formula) -> Optional[Countermodel]:
    """A GL tree model satisfying phi at its root, if one exists."""
    _require_single_modality(phi)
    world = _solve([(phi, True)])
    if world is None:
        return None
    tree, valuation = _assemble(world, sorted(fm.variables(phi)))
    if not model_check_tree(tree, valuation, phi) >> tree.root & 1:
        raise RuntimeError("internal error: model failed verification")
    return Countermodel(tree, valuation, tree.root)


# ---------------------------------------------------------------------------
# GL.3: linear frames


def gl3_decide(phi: fm.Formula) -> GlVerdict:
    """Decide GL.3-provability over finite strict linear orders.

    Worlds are stacked top-down; a profile records which closure formulas
    are true (resp. false) at some world already placed above.  Profiles
    grow monotonically, so every reachable profile is reached by a chain
    of at most |closure(phi)|+1 worlds, which is the finite-model bound.
    """
    _require_single_modality(phi)
    cl = sorted(fm.closure(phi), key=fm.size)
    names = sorted(fm.variables(phi))
    assigns = [
        {name: bool(bits >> i & 1) for i, name in enumerate(names)}
        for bits in range(1 << len(names))
    ]

    def truths(assign, etrue, efalse):
        val = {}
        for f in cl:  # sorted by size: subformulas first
            if isinstance(f, fm.Top):
                val[f] = True
            elif isinstance(f, fm.Bot):
                val[f] = False
            elif isinstance(f, fm.Var):
                val[f] = assign[f.name]
            elif isinstance(f, fm.Not):
                val[f] = not val[f.sub]
            elif isinstance(f, fm.And):
                val[f] = val[f.lhs] and val[f.rhs]
            elif isinstance(f, fm.Or):
                val[f] = val[f.lhs] or val[f.rhs]
            elif isinstance(f, fm.Imp):
                val[f] = (not val[f.lhs]) or val[f.rhs]
            elif isinstance(f, fm.Dia):
                val[f] = f.sub in etrue
            elif isinstance(f, fm.Box):
                val[f] = f.sub not in efalse
        return val

    start = (frozenset(), frozenset())
    parents = {start: None}
    queue = [start]
    refuted = None
    while queue and refuted is None:
        etrue, efalse = queue.pop(0)
        for k, assign in enumerate(assigns):
            val = truths(assign, etrue, efalse)
            if not val[phi]:
                refuted = ((etrue, efalse), k)
                break
            nxt = (
                etrue | {f for f, v in val.items() if v},
                efalse | {f for f, v in val.items() if not v},
            )
            if nxt not in parents:
                parents[nxt] = ((etrue, efalse), k)
                queue.append(nxt)
    if refuted is None:
        return GlVerdict(True)
    # Reconstruct the chain: the refuting world is the root; the worlds
    # that built its profile sit above it in reverse construction order.
    stack = []
    profile, k = refuted
    stack.append(k)
    cur = parents[profile]
    while cur is not None:
        prev_profile, kk = cur
        stack.append(kk)
        cur = parents[prev_profile]
    t = chain(len(stack))
    valuation = {
        name: sp.mask(i for i, kk in enumerate(stack) if assigns[kk][name])
        for name in names
    }
    if model_check_tree(t, valuation, phi) >> 0 & 1:
        raise RuntimeError("internal error: chain countermodel failed verification")
    return GlVerdict(False, Countermodel(t, valuation, 0))


# ---------------------------------------------------------------------------
# DOT export


def tree_to_dot(t: Tree, labels: Optional[dict] = None, name: str = "tree") -> str:
    lines = ["digraph %s {" % name]
    for x in range(t.n):
        label = labels.get(x, str(x)) if labels else str(x)
        lines.append('  n%d [label="%s"];' % (x, label.replace('"', "'")))
    for x, p in enumerate(t.parent):
        if p is not None:
            lines.append("  n%d -> n%d;" % (p, x))
    lines.append("}")
    return "\n".join(lines)


def countermodel_to_dot(cm: Countermodel, phi: fm.Formula) -> str:
    """DOT with each node labelled by the closure subformulas true there."""
    labels = {}
    sats = {
        f: model_check_tree(cm.tree, cm.valuation, f)
        for f in sorted(fm.closure(phi), key=fm.size)
    }
    for x in range(cm.tree.n):
        true_here = [fm.pretty(f) for f, m in sats.items() if m >> x & 1]
        labels[x] = "%d: %s" % (x, ", ".join(true_here) if true_here else "-")
    return tree_to_dot(cm.tree, labels, name="countermodel")
