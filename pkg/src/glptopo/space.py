"""Finite topological spaces with explicit open-set families.

Point subsets are bit masks over the carrier 0..n-1 (bit i set iff point i
belongs).  Every finite topology is Alexandrov, so each space caches the
minimal open neighborhood of every point; derivatives, interiors and the
open family itself are computed from that table.  The slow definitional
loops survive as oracles in the test suite.

The carrier is capped at 16 points so that exhaustive 2^n scans stay
desk-sized.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import formula as fm
from .errors import CapExceeded, MagariViolation

MAX_POINTS = 16
DEFAULT_SCAN_CAP = 1 << 22


def mask(points) -> int:
    """Bit mask of an iterable of point indices."""
    m = 0
    for p in points:
        m |= 1 << p
    return m


def points(m: int) -> tuple:
    """Sorted tuple of point indices in a mask."""
    out = []
    i = 0
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


class FiniteSpace:
    """A topology on points 0..n-1, stored as a canonical family of masks."""

    __slots__ = ("n", "full", "opens", "opens_set", "_neigh", "_dtable", "_nptable")

    def __init__(self, n: int, opens, _trusted: bool = False):
        if not 1 <= n <= MAX_POINTS:
            raise ValueError("carrier size must be between 1 and %d" % MAX_POINTS)
        self.n = n
        self.full = (1 << n) - 1
        fam = sorted(set(opens))
        self.opens = tuple(fam)
        self.opens_set = frozenset(fam)
        self._neigh = None
        self._dtable = None
        self._nptable = None
        if not _trusted:
            self._validate()

    # -- construction -------------------------------------------------------

    @classmethod
    def from_opens(cls, n: int, sets) -> "FiniteSpace":
        """Build from explicit opens given as iterables of point indices."""
        fam = [mask(s) if not isinstance(s, int) else s for s in sets]
        full = (1 << n) - 1
        for m in fam:
            if m & ~full:
                raise ValueError("open set out of range: %s" % (points(m),))
        return cls(n, fam + [0, full])

    @classmethod
    def from_subbase(cls, n: int, sets) -> "FiniteSpace":
        """Smallest topology containing the given sets."""
        full = (1 << n) - 1
        fam = [mask(s) if not isinstance(s, int) else s for s in sets]
        for m in fam:
            if m & ~full:
                raise ValueError("subbase set out of range: %s" % (points(m),))
        neigh = []
        for x in range(n):
            nb = full
            for m in fam:
                if m >> x & 1:
                    nb &= m
            neigh.append(nb)
        return cls._from_neigh(n, neigh)

    @classmethod
    def from_order(cls, pairs, mode: str = "upset", n: Optional[int] = None) -> "FiniteSpace":
        """Alexandrov topology of a strict partial order.

        ``mode="upset"`` makes the up-closed sets open; ``mode="left"``
        the down-closed ones.  The relation must be irreflexive and
        transitive as given.
        """
        pairs = [(int(a), int(b)) for a, b in pairs]
        if n is None:
            n = max((max(a, b) for a, b in pairs), default=-1) + 1
            n = max(n, 1)
        rel = set(pairs)
        for a, b in rel:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError("order pair out of range: (%d, %d)" % (a, b))
            if a == b:
                raise ValueError("order is not irreflexive at %d" % a)
        for a, b in rel:
            for c, d in rel:
                if b == c and (a, d) not in rel:
                    raise ValueError(
                        "order is not transitive: (%d,%d),(%d,%d) without (%d,%d)"
                        % (a, b, c, d, a, d)
                    )
        if mode not in ("upset", "left"):
            raise ValueError("mode must be 'upset' or 'left'")
        neigh = [1 << x for x in range(n)]
        for a, b in rel:
            if mode == "upset":
                neigh[a] |= 1 << b
            else:
                neigh[b] |= 1 << a
        return cls._from_neigh(n, neigh)

    @classmethod
    def discrete(cls, n: int) -> "FiniteSpace":
        return cls._from_neigh(n, [1 << x for x in range(n)])

    @classmethod
    def indiscrete(cls, n: int) -> "FiniteSpace":
        full = (1 << n) - 1
        return cls._from_neigh(n, [full] * n)

    @classmethod
    def chain_left(cls, n: int) -> "FiniteSpace":
        """Chain 0 < 1 < ... < n-1 with the left (downset) topology."""
        return cls._from_neigh(n, [(1 << (x + 1)) - 1 for x in range(n)])

    @classmethod
    def _from_neigh(cls, n: int, neigh) -> "FiniteSpace":
        full = (1 << n) - 1
        opens = []
        for m in range(full + 1):
            rest = m
            ok = True
            while rest:
                x = (rest & -rest).bit_length() - 1
                if neigh[x] & ~m:
                    ok = False
                    break
                rest &= rest - 1
            if ok:
                opens.append(m)
        space = cls(n, opens, _trusted=True)
        space._neigh = tuple(neigh)
        return space

    def _validate(self):
        if 0 not in self.opens_set or self.full not in self.opens_set:
            raise ValueError("opens must contain the empty set and the carrier")
        # A finite family with 0 and full is a topology iff it equals the
        # up-closed sets of its own minimal-neighborhood table.
        neigh = self._minimal_neighborhoods()
        regenerated = FiniteSpace._from_neigh(self.n, neigh)
        if regenerated.opens != self.opens:
            diff = set(regenerated.opens) ^ self.opens_set
            raise ValueError(
                "family is not closed under union/intersection; "
                "discrepancy at %s" % (sorted(points(m) for m in diff),)
            )

    def _minimal_neighborhoods(self):
        if self._neigh is None:
            neigh = []
            for x in range(self.n):
                nb = self.full
                for m in self.opens:
                    if m >> x & 1:
                        nb &= m
                neigh.append(nb)
            self._neigh = tuple(neigh)
        return self._neigh

    # -- basic queries -------------------------------------------------------

    @property
    def neigh(self):
        """Minimal open neighborhood of each point."""
        return self._minimal_neighborhoods()

    def is_open(self, m: int) -> bool:
        return m in self.opens_set

    def is_closed(self, m: int) -> bool:
        return (self.full & ~m) in self.opens_set

    def interior(self, m: int) -> int:
        nb = self.neigh
        out = 0
        for x in range(self.n):
            if m >> x & 1 and not nb[x] & ~m:
                out |= 1 << x
        return out

    def derivative(self, m: int) -> int:
        """Limit points of a subset: minimal neighborhood meets m minus x."""
        if m & ~self.full:
            raise ValueError("subset out of range")
        nb = self.neigh
        out = 0
        for x in range(self.n):
            if nb[x] & m & ~(1 << x):
                out |= 1 << x
        return out

    def derivative_by_definition(self, m: int) -> int:
        """Definitional derivative quantifying over every open; test oracle."""
        out = 0
        for x in range(self.n):
            bit = 1 << x
            if all(u & m & ~bit for u in self.opens if u & bit):
                out |= bit
        return out

    def derivative_table(self):
        """d(A) for every subset mask A, as a tuple indexed by mask."""
        if self._dtable is None:
            nb = self.neigh
            table = [0] * (self.full + 1)
            for x in range(self.n):
                bit = 1 << x
                hood = nb[x] & ~bit
                for m in range(self.full + 1):
                    if hood & m:
                        table[m] |= bit
            self._dtable = tuple(table)
        return self._dtable

    def _np_dtable(self):
        if self._nptable is None:
            self._nptable = np.array(self.derivative_table(), dtype=np.int64)
        return self._nptable

    def isolated_points(self) -> int:
        return self.full & ~self.derivative(self.full)

    def cb_sequence(self):
        """Decreasing derivative iterates of the carrier, ending at the
        empty set (scattered) or at the first repeated set."""
        seq = [self.full]
        cur = self.full
        while cur:
            nxt = self.derivative(cur)
            if nxt == cur:
                break
            seq.append(nxt)
            cur = nxt
        return seq

    # -- classification ------------------------------------------------------

    def classify(self) -> "SpaceReport":
        seq = self.cb_sequence()
        scattered = seq[-1] == 0
        cb_rank = len(seq) - 1 if scattered else 0
        ranks = []
        for x in range(self.n):
            bit = 1 << x
            rank = None
            for k, layer in enumerate(seq):
                if not layer & bit:
                    rank = k - 1
                    break
            else:
                if scattered:
                    rank = len(seq) - 1
            ranks.append(rank)
        table = self.derivative_table()
        t_d = all(self.is_closed(table[m]) for m in range(self.full + 1))
        t1 = all(self.is_closed(1 << x) for x in range(self.n))
        discrete = len(self.opens) == self.full + 1
        magari = self._magari(table)
        primal = self._primal(discrete)
        return SpaceReport(
            scattered=scattered,
            t_d=t_d,
            t1=t1,
            discrete=discrete,
            magari=magari,
            primal=primal,
            cb_rank=cb_rank,
            rank_of_point=tuple(ranks),
        )

    def _magari(self, table) -> bool:
        # M1: d(0) = 0 and additivity; singleton additivity implies the
        # general case by induction on the finite carrier.
        if table[0] != 0:
            return False
        for x in range(self.n):
            dx = table[1 << x]
            for m in range(self.full + 1):
                if table[m | (1 << x)] != table[m] | dx:
                    return False
        # M2: d(A) = d(A minus dA), checked on every subset.
        for m in range(self.full + 1):
            dm = table[m]
            if table[m & ~dm] != dm:
                return False
        return True

    def _primal(self, discrete: bool) -> bool:
        # Punctured neighborhoods of each point must form a prime filter:
        # {x} u U u V open implies {x} u U or {x} u V open.
        if discrete:
            return True
        nb = self.neigh
        opens = self.opens
        for x in range(self.n):
            punct = nb[x] & ~(1 << x)
            if punct == 0:
                continue  # isolated: condition is vacuous
            for i, u in enumerate(opens):
                for v in opens[i:]:
                    if punct & ~(u | v) == 0:
                        if punct & ~u and punct & ~v:
                            return False
        return True

    # -- derived topology ----------------------------------------------------

    def plus_topology(self) -> "FiniteSpace":
        """Coarsest refinement in which every derivative set is open."""
        table = self.derivative_table()
        nb = list(self.neigh)
        for x in range(self.n):
            bit = 1 << x
            acc = nb[x]
            for m in range(self.full + 1):
                d = table[m]
                if d & bit:
                    acc &= d
            nb[x] = acc
        return FiniteSpace._from_neigh(self.n, nb)

    # -- d-sums ---------------------------------------------------------------

    def dsum(self, plugins: dict) -> tuple:
        """Plug spaces into isolated points; returns (space, projection).

        Keys of ``plugins`` must be isolated points; every other point
        implicitly receives a one-point space.  The carrier of the sum
        lists the blocks in base-point order.
        """
        iso = self.isolated_points()
        for j in plugins:
            if not iso >> j & 1:
                raise ValueError("point %d is not isolated" % j)
        sizes = [plugins[j].n if j in plugins else 1 for j in range(self.n)]
        total = sum(sizes)
        if total > MAX_POINTS:
            raise CapExceeded("d-sum carrier would have %d > %d points" % (total, MAX_POINTS))
        offsets = [0] * self.n
        acc = 0
        for j in range(self.n):
            offsets[j] = acc
            acc += sizes[j]

        def embed(j, m):
            return m << offsets[j]

        proj = []
        for j in range(self.n):
            proj.extend([j] * sizes[j])
        base_nb = self.neigh
        neigh = [0] * total
        for j in range(self.n):
            if iso >> j & 1:
                sub = plugins.get(j)
                if sub is None:
                    neigh[offsets[j]] = 1 << offsets[j]
                else:
                    for z in range(sub.n):
                        neigh[offsets[j] + z] = embed(j, sub.neigh[z])
            else:
                pre = 0
                hood = base_nb[j]
                for k in range(self.n):
                    if hood >> k & 1:
                        pre |= ((1 << sizes[k]) - 1) << offsets[k]
                neigh[offsets[j]] = pre
        space = FiniteSpace._from_neigh(total, neigh)
        return space, PointMap(space, self, tuple(proj))

    # -- rank -----------------------------------------------------------------

    def rank_map(self) -> "PointMap":
        """The rank function onto a left-topology chain; requires scattered."""
        seq = self.cb_sequence()
        if seq[-1] != 0:
            raise ValueError("space is not scattered")
        rank = [0] * self.n
        for layer in seq[1:]:
            for x in range(self.n):
                if layer >> x & 1:
                    rank[x] += 1
        target = FiniteSpace.chain_left(len(seq) - 1)
        return PointMap(self, target, tuple(rank))

    # -- d-reflection ----------------------------------------------------------

    def reflexive_points(self, m: int = 1, cap: int = DEFAULT_SCAN_CAP) -> int:
        """Points of dX reflecting m-fold intersections of derivative sets.

        Brute force over all m-tuples of subsets; requires a T_d space.
        """
        if m < 1:
            raise ValueError("m must be >= 1")
        table = self.derivative_table()
        if not all(self.is_closed(table[a]) for a in range(self.full + 1)):
            raise ValueError("space is not T_d")
        subsets = self.full + 1
        combos = _comb_with_repl_count(subsets, m)
        if combos > cap:
            raise CapExceeded(
                "%d subset tuples exceed the cap %d" % (combos, cap)
            )
        dx = self.derivative(self.full)
        failed = 0
        for tup in itertools.combinations_with_replacement(range(subsets), m):
            inter = self.full
            for a in tup:
                inter &= table[a]
            if inter:
                failed |= inter & ~table[inter]
            if not dx & ~failed:
                break
        return dx & ~failed

    # -- object protocol -------------------------------------------------------

    def __eq__(self, other):
        return (
            isinstance(other, FiniteSpace)
            and self.n == other.n
            and self.opens == other.opens
        )

    def __hash__(self):
        return hash((self.n, self.opens))

    def __repr__(self):
        return "FiniteSpace(n=%d, opens=%d sets)" % (self.n, len(self.opens))

    def to_json(self) -> dict:
        return {"points": self.n, "opens": [list(points(m)) for m in self.opens]}


def _comb_with_repl_count(n, k):
    from math import comb

    return comb(n + k - 1, k)


@dataclass(frozen=True)
class SpaceReport:
    scattered: bool
    t_d: bool
    t1: bool
    discrete: bool
    magari: bool
    primal: bool
    cb_rank: int
    rank_of_point: tuple

    def to_json(self) -> dict:
        return {
            "scattered": self.scattered,
            "t_d": self.t_d,
            "t1": self.t1,
            "discrete": self.discrete,
            "magari": self.magari,
            "primal": self.primal,
            "cb_rank": self.cb_rank,
            "rank_of_point": list(self.rank_of_point),
        }


@dataclass(frozen=True)
class PointMap:
    """A total map between the carriers of two finite spaces."""

    source: FiniteSpace
    target: FiniteSpace
    assignment: tuple

    def __post_init__(self):
        if len(self.assignment) != self.source.n:
            raise ValueError("assignment must be total on the source carrier")
        for y in self.assignment:
            if not 0 <= y < self.target.n:
                raise ValueError("assignment value out of range: %r" % (y,))

    def apply_mask(self, m: int) -> int:
        out = 0
        for x in range(self.source.n):
            if m >> x & 1:
                out |= 1 << self.assignment[x]
        return out

    def preimage_mask(self, m: int) -> int:
        out = 0
        for x in range(self.source.n):
            if m >> self.assignment[x] & 1:
                out |= 1 << x
        return out

    @property
    def is_onto(self) -> bool:
        return self.apply_mask(self.source.full) == self.target.full


@dataclass(frozen=True)
class DMapReport:
    """Verdict of the d-map check with a failure certificate.

    ``failure`` is None, or one of "continuity", "openness", "fiber";
    ``witness`` is the offending open mask, or (point, fiber mask).
    """

    ok: bool
    failure: Optional[str] = None
    witness: object = None

    def __bool__(self):
        return self.ok


def is_dmap(f: PointMap) -> DMapReport:
    """Check continuity, openness and pointwise discreteness of f."""
    for u in f.target.opens:
        if f.preimage_mask(u) not in f.source.opens_set:
            return DMapReport(False, "continuity", u)
    for u in f.source.opens:
        if f.apply_mask(u) not in f.target.opens_set:
            return DMapReport(False, "openness", u)
    nb = f.source.neigh
    for y in range(f.target.n):
        fiber = f.preimage_mask(1 << y)
        rest = fiber
        while rest:
            x = (rest & -rest).bit_length() - 1
            if nb[x] & fiber & ~(1 << x):
                return DMapReport(False, "fiber", (y, fiber))
            rest &= rest - 1
    return DMapReport(True)


# ---------------------------------------------------------------------------
# GLP-space conditions


@dataclass(frozen=True)
class GlpPairReport:
    derivative_sets_open: bool  # D1 for this adjacent pair
    refines: bool  # D2
    d1_witness: Optional[int] = None
    d2_witness: Optional[int] = None

    @property
    def ok(self):
        return self.derivative_sets_open and self.refines


@dataclass(frozen=True)
class GlpSpaceReport:
    scattered: tuple  # D0 per level
    pairs: tuple

    @property
    def ok(self):
        return all(self.scattered) and all(p.ok for p in self.pairs)

    def to_json(self):
        return {
            "ok": self.ok,
            "scattered": list(self.scattered),
            "pairs": [
                {
                    "d1": p.derivative_sets_open,
                    "d1_witness": None if p.d1_witness is None else list(points(p.d1_witness)),
                    "d2": p.refines,
                    "d2_witness": None if p.d2_witness is None else list(points(p.d2_witness)),
                }
                for p in self.pairs
            ],
        }


def check_glp_space(spaces) -> GlpSpaceReport:
    """Check D0-D2 on a finite sequence of topologies over shared points."""
    spaces = list(spaces)
    if not spaces:
        raise ValueError("need at least one topology")
    n = spaces[0].n
    if any(sp.n != n for sp in spaces):
        raise ValueError("all topologies must share the carrier")
    scattered = tuple(sp.cb_sequence()[-1] == 0 for sp in spaces)
    pairs = []
    for lo, hi in zip(spaces, spaces[1:]):
        d1_witness = None
        table = lo.derivative_table()
        for m in range(lo.full + 1):
            if table[m] not in hi.opens_set:
                d1_witness = m
                break
        d2_witness = None
        for u in lo.opens:
            if u not in hi.opens_set:
                d2_witness = u
                break
        pairs.append(
            GlpPairReport(
                derivative_sets_open=d1_witness is None,
                refines=d2_witness is None,
                d1_witness=d1_witness,
                d2_witness=d2_witness,
            )
        )
    return GlpSpaceReport(scattered=scattered, pairs=tuple(pairs))


# ---------------------------------------------------------------------------
# Exhaustive enumeration of small topologies


def enumerate_topologies(n: int):
    """Every topology on n labeled points, one per preorder.

    Finite topologies correspond exactly to preorders via minimal
    neighborhoods; this iterates over the reflexive transitive relations.
    """
    if not 1 <= n <= 5:
        raise CapExceeded("enumeration is only sensible for 1..5 points")
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    for bits in range(1 << len(cells)):
        rel = [[i == j for j in range(n)] for i in range(n)]
        for k, (i, j) in enumerate(cells):
            if bits >> k & 1:
                rel[i][j] = True
        ok = True
        for i in range(n):
            for j in range(n):
                if not rel[i][j]:
                    continue
                for k in range(n):
                    if rel[j][k] and not rel[i][k]:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            neigh = [mask(j for j in range(n) if rel[i][j]) for i in range(n)]
            yield FiniteSpace._from_neigh(n, neigh)


# ---------------------------------------------------------------------------
# Reconstructing a topology from a derivative operator


def topology_from_operator(n: int, delta) -> FiniteSpace:
    """The unique topology whose derivative is the given operator table.

    ``delta`` lists delta(A) for every subset mask A in order.  Raises
    MagariViolation if the table fails M1 or M2; the reconstructed
    topology is verified against the table exhaustively.
    """
    full = (1 << n) - 1
    delta = list(delta)
    if len(delta) != full + 1:
        raise ValueError("operator table must cover all %d subsets" % (full + 1))
    if delta[0] != 0:
        raise MagariViolation("M1", 0, "delta(empty) must be empty")
    for x in range(n):
        dx = delta[1 << x]
        for m in range(full + 1):
            if delta[m | (1 << x)] != delta[m] | dx:
                raise MagariViolation(
                    "M1",
                    (m, 1 << x),
                    "delta is not additive at A=%s, B=%s"
                    % (points(m), points(1 << x)),
                )
    for m in range(full + 1):
        if delta[m & ~delta[m]] != delta[m]:
            raise MagariViolation(
                "M2",
                m,
                "delta(A minus delta A) differs from delta(A) at A=%s" % (points(m),),
            )
    opens = [full & ~m for m in range(full + 1) if delta[m] & ~m == 0]
    space = FiniteSpace(n, opens)
    table = space.derivative_table()
    for m in range(full + 1):
        if table[m] != delta[m]:
            raise RuntimeError(
                "internal error: reconstructed topology disagrees with the "
                "operator at %s" % (points(m),)
            )
    return space


# ---------------------------------------------------------------------------
# Model checking and validity


def model_check(spaces, valuation: dict, phi: fm.Formula) -> int:
    """Truth set of a formula; modality n is the derivative of spaces[n]."""
    spaces = list(spaces)
    if not spaces:
        raise ValueError("need at least one topology")
    full = spaces[0].full
    if any(sp.n != spaces[0].n for sp in spaces):
        raise ValueError("all topologies must share the carrier")
    for name, m in valuation.items():
        if m & ~full:
            raise ValueError("valuation of %r out of range" % name)

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
        if isinstance(f, fm.Dia):
            if f.index >= len(spaces):
                raise ValueError("modality index %d out of range" % f.index)
            return spaces[f.index].derivative(ev(f.sub))
        if isinstance(f, fm.Box):
            if f.index >= len(spaces):
                raise ValueError("modality index %d out of range" % f.index)
            return full & ~spaces[f.index].derivative(full & ~ev(f.sub))
        raise TypeError("not a formula: %r" % (f,))

    return ev(phi)


@dataclass(frozen=True)
class ValidityResult:
    valid: bool
    valuation: Optional[dict] = None
    point: Optional[int] = None

    def __bool__(self):
        return self.valid


def validates(spaces, phi: fm.Formula, cap: int = DEFAULT_SCAN_CAP) -> ValidityResult:
    """Check validity by enumerating every valuation of the variables.

    The scan is vectorized over all (2^n)^k valuations at once; raises
    CapExceeded when that count exceeds ``cap``.  On failure returns a
    falsifying valuation and point.
    """
    spaces = list(spaces)
    if not spaces:
        raise ValueError("need at least one topology")
    n = spaces[0].n
    if any(sp.n != n for sp in spaces):
        raise ValueError("all topologies must share the carrier")
    full = spaces[0].full
    names = sorted(fm.variables(phi))
    for f in fm.closure(phi):
        if isinstance(f, (fm.Dia, fm.Box)) and f.index >= len(spaces):
            raise ValueError("modality index %d out of range" % f.index)
    count = (full + 1) ** len(names)
    if count > cap:
        raise CapExceeded("%d valuations exceed the cap %d" % (count, cap))
    idx = np.arange(count, dtype=np.int64)
    env = {
        name: (idx >> (n * j)) & full for j, name in enumerate(names)
    }
    tables = [sp._np_dtable() for sp in spaces]

    def ev(f):
        if isinstance(f, fm.Top):
            return np.full(count, full, dtype=np.int64)
        if isinstance(f, fm.Bot):
            return np.zeros(count, dtype=np.int64)
        if isinstance(f, fm.Var):
            return env[f.name]
        if isinstance(f, fm.Not):
            return full & ~ev(f.sub)
        if isinstance(f, fm.And):
            return ev(f.lhs) & ev(f.rhs)
        if isinstance(f, fm.Or):
            return ev(f.lhs) | ev(f.rhs)
        if isinstance(f, fm.Imp):
            return (full & ~ev(f.lhs)) | ev(f.rhs)
        if isinstance(f, fm.Dia):
            return tables[f.index][ev(f.sub)]
        if isinstance(f, fm.Box):
            return full & ~tables[f.index][full & ~ev(f.sub)]
        raise TypeError("not a formula: %r" % (f,))

    truth = ev(phi)
    bad = np.nonzero(truth != full)[0]
    if bad.size == 0:
        return ValidityResult(True)
    i = int(bad[0])
    valuation = {name: int(env[name][i]) for name in names}
    missing = full & ~int(truth[i])
    point = (missing & -missing).bit_length() - 1
    return ValidityResult(False, valuation, point)
