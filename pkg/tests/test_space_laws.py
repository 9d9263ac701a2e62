"""Law-level properties of the derivative machinery, on small random spaces.

The acceptance suite runs the same laws over the full corpus; here they are
exercised on smaller samples together with the laws that are not part of
the acceptance gate (d-map pullback, rank composition and uniqueness, the
glued d-sum map, the neighborhood characterization of the derived
topology).
"""

import itertools
import random

import pytest

from glptopo import formula as fm
from glptopo import sampling
from glptopo.space import (
    FiniteSpace,
    PointMap,
    check_glp_space,
    is_dmap,
    validates,
)


@pytest.fixture(scope="module")
def rng():
    return random.Random(99)


@pytest.fixture(scope="module")
def mixed_spaces(rng):
    spaces = []
    for n in (2, 3, 4, 5):
        spaces.extend(sampling.random_space(rng, n) for _ in range(15))
    return spaces


@pytest.fixture(scope="module")
def scattered_spaces(rng):
    spaces = []
    for n in (2, 3, 4, 5):
        spaces.extend(sampling.random_scattered_space(rng, n) for _ in range(10))
    return spaces


def test_scattered_iff_magari_on_samples(mixed_spaces):
    for space in mixed_spaces:
        rep = space.classify()
        assert rep.scattered == rep.magari


def test_transitivity_in_magari_spaces(mixed_spaces):
    for space in mixed_spaces:
        if not space.classify().magari:
            continue
        table = space.derivative_table()
        for m in range(space.full + 1):
            assert table[table[m]] & ~table[m] == 0


def test_scattered_implies_t_d(mixed_spaces):
    for space in mixed_spaces:
        rep = space.classify()
        if rep.scattered:
            assert rep.t_d


def test_plus_topology_t1_and_refines(mixed_spaces):
    for space in mixed_spaces:
        plus = space.plus_topology()
        for x in range(space.n):
            assert plus.is_closed(1 << x)
        assert set(space.opens) <= plus.opens_set
        # finite T1 implies discrete
        assert plus == FiniteSpace.discrete(space.n)


def test_derived_set_of_carrier_never_open_when_scattered(scattered_spaces):
    for space in scattered_spaces:
        dx = space.derivative(space.full)
        if dx:
            assert not space.is_open(dx)


def test_lin_iff_primal(mixed_spaces):
    for space in mixed_spaces:
        assert validates([space], fm.lin_schema()).valid == space.classify().primal


def test_dot3_iff_lin_on_scattered(scattered_spaces):
    lin, dot3 = fm.lin_schema(), fm.dot3_schema()
    for space in scattered_spaces:
        assert validates([space], lin).valid == validates([space], dot3).valid


def test_doubly_reflexive_equals_plus_limit_points(mixed_spaces):
    for space in mixed_spaces:
        if not space.classify().t_d:
            continue
        plus = space.plus_topology()
        limits = plus.derivative(plus.full)
        assert space.reflexive_points(2) == limits


def test_doubly_implies_m_fold(mixed_spaces):
    for space in mixed_spaces:
        if space.n > 4 or not space.classify().t_d:
            continue
        doubly = space.reflexive_points(2)
        for m in (3, 4):
            assert doubly & ~space.reflexive_points(m) == 0


def test_d_plus_characterization(mixed_spaces):
    # x in d+(A) iff x doubly reflexive and every dB containing x reflects
    # into A: x in d(A & dB).
    for space in mixed_spaces:
        if space.n > 5 or not space.classify().t_d:
            continue
        plus = space.plus_topology()
        table = space.derivative_table()
        doubly = space.reflexive_points(2)
        for a in range(space.full + 1):
            dplus = plus.derivative(a)
            for x in range(space.n):
                cond = bool(doubly >> x & 1) and all(
                    not table[b] >> x & 1 or table[a & table[b]] >> x & 1
                    for b in range(space.full + 1)
                )
                assert cond == bool(dplus >> x & 1)


def test_neighborhood_characterization(mixed_spaces):
    # U contains a tau+-neighborhood of x iff x is not doubly reflexive and
    # x in U, or some open A and subset B give x in A & dB <= U.
    for space in mixed_spaces:
        if space.n > 4 or not space.classify().t_d:
            continue
        plus = space.plus_topology()
        doubly = space.reflexive_points(2)
        dsets = sorted(set(space.derivative_table()))
        for u in range(space.full + 1):
            interior_plus = plus.interior(u)
            for x in range(space.n):
                lhs = bool(interior_plus >> x & 1)
                if not doubly >> x & 1:
                    rhs = bool(u >> x & 1)
                else:
                    rhs = any(
                        not (a & db) & ~u
                        for a in space.opens
                        for db in dsets
                        if a >> x & 1 and db >> x & 1
                    )
                assert lhs == rhs


def test_dmap_pullback_identity(scattered_spaces):
    # f^{-1}(d_Y A) = d_X(f^{-1} A) for every subset, for known d-maps
    for space in scattered_spaces[:20]:
        f = space.rank_map()
        assert is_dmap(f).ok
        ytab = f.target.derivative_table()
        xtab = space.derivative_table()
        for a in range(f.target.full + 1):
            assert f.preimage_mask(ytab[a]) == xtab[f.preimage_mask(a)]


def test_rank_composition(scattered_spaces):
    # rho_X = rho_Y o f for any d-map f; exercised on d-sum gluings below
    for space in scattered_spaces[:20]:
        f = space.rank_map()
        ranks_x = f.assignment
        ranks_y = f.target.rank_map().assignment
        for x in range(space.n):
            assert ranks_x[x] == ranks_y[f.assignment[x]]


def test_rank_map_unique_dmap_into_chains(rng):
    # every d-map into a left chain equals the rank map (Lemma, part ii)
    for _ in range(25):
        space = sampling.random_scattered_space(rng, rng.randint(2, 4))
        rank = space.rank_map().assignment
        height = max(rank) + 1
        for length in range(1, height + 2):
            chain = FiniteSpace.chain_left(length)
            for assign in itertools.product(range(length), repeat=space.n):
                f = PointMap(space, chain, assign)
                if is_dmap(f).ok:
                    # image is the rank ordinal and the map is the rank function
                    assert length >= height
                    assert set(assign) == set(range(height))
                    assert assign == rank


def _glued_dsum_maps(rng):
    """Random instances of the d-sum-of-d-maps lemma."""
    for _ in range(15):
        base = sampling.random_scattered_space(rng, rng.randint(2, 4))
        f = base.rank_map()
        chain = f.target
        iso = base.isolated_points()
        # isolated points of the chain target: only rank 0
        rank0 = 1 if chain.n >= 1 else 0
        plug_rank = rng.randint(1, 2)
        target_plug = FiniteSpace.chain_left(plug_rank)
        plugs, fibers = {}, {}
        for j in range(base.n):
            if iso >> j & 1:
                while True:
                    y = sampling.random_scattered_space(rng, rng.randint(1, 3))
                    rm = y.rank_map()
                    if rm.target.n == plug_rank:
                        break
                plugs[j] = y
                fibers[j] = rm
        yield base, f, plugs, fibers, target_plug


def test_dsum_of_dmaps_is_dmap(rng):
    for base, f, plugs, fibers, target_plug in _glued_dsum_maps(rng):
        z, proj = base.dsum(plugs)
        zprime, projprime = f.target.dsum({0: target_plug})
        # glue: fiber maps over isolated points, f elsewhere
        assign = []
        for x in range(z.n):
            j = proj.assignment[x]
            if j in fibers:
                local = x - min(
                    i for i in range(z.n) if proj.assignment[i] == j
                )
                assign.append(fibers[j].assignment[local])  # lands in plug of 0
            else:
                offset_of_target = [0] * f.target.n
                acc = 0
                for k in range(f.target.n):
                    offset_of_target[k] = acc
                    acc += target_plug.n if k == 0 else 1
                assign.append(offset_of_target[f.assignment[j]])
        g = PointMap(z, zprime, tuple(assign))
        assert g.is_onto
        assert is_dmap(g).ok


def test_glp_space_chain_from_plus_iteration(scattered_spaces):
    for space in scattered_spaces[:15]:
        tower = [space, space.plus_topology()]
        tower.append(tower[-1].plus_topology())
        assert check_glp_space(tower).ok
