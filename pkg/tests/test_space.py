import pytest

from glptopo import formula as fm
from glptopo.errors import CapExceeded, MagariViolation
from glptopo.space import (
    FiniteSpace,
    PointMap,
    check_glp_space,
    is_dmap,
    mask,
    model_check,
    points,
    topology_from_operator,
    validates,
)

M = mask


class TestFromSubbase:
    def test_indiscrete(self):
        space = FiniteSpace.from_subbase(2, [])
        assert space.opens == (0, 0b11)

    def test_sierpinski(self):
        space = FiniteSpace.from_subbase(2, [[0]])
        assert space.opens == (0, 0b01, 0b11)

    def test_chain_by_hand(self):
        # closure of {{2},{1,2}} on 3 points, computed by hand
        space = FiniteSpace.from_subbase(3, [[2], [1, 2]])
        assert space.opens == (0, M([2]), M([1, 2]), M([0, 1, 2]))

    def test_agrees_with_union_intersection_closure(self):
        # oracle: literal closure under pairwise unions/intersections
        import itertools
        import random

        rng = random.Random(7)
        for _ in range(40):
            n = rng.randint(1, 5)
            sets = [rng.getrandbits(n) for _ in range(rng.randint(0, 4))]
            family = set(sets) | {0, (1 << n) - 1}
            while True:
                new = set()
                for a, b in itertools.product(family, repeat=2):
                    new.add(a | b)
                    new.add(a & b)
                if new <= family:
                    break
                family |= new
            assert FiniteSpace.from_subbase(n, sets).opens == tuple(sorted(family))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            FiniteSpace.from_subbase(2, [[2]])


class TestFromOrder:
    def test_two_fork(self):
        space = FiniteSpace.from_order([(0, 1), (0, 2)])
        assert space.opens == (0, M([1]), M([2]), M([1, 2]), M([0, 1, 2]))

    def test_empty_order_is_discrete(self):
        assert FiniteSpace.from_order([], n=1) == FiniteSpace.discrete(1)

    def test_chain_left_mode(self):
        space = FiniteSpace.from_order([(0, 1), (1, 2), (0, 2)], mode="left")
        assert space.opens == (0, M([0]), M([0, 1]), M([0, 1, 2]))

    def test_rejects_reflexive_and_intransitive(self):
        with pytest.raises(ValueError):
            FiniteSpace.from_order([(0, 0)], n=1)
        with pytest.raises(ValueError):
            FiniteSpace.from_order([(0, 1), (1, 2)], n=3)  # missing (0,2)


class TestDerivative:
    def test_sierpinski(self, sierpinski):
        assert sierpinski.derivative(M([0])) == M([1])
        assert sierpinski.derivative(M([1])) == 0

    def test_empty_always_empty(self):
        for space in [FiniteSpace.discrete(3), FiniteSpace.indiscrete(3)]:
            assert space.derivative(0) == 0

    def test_fork_full(self, fork2_space):
        assert fork2_space.derivative(fork2_space.full) == M([0])

    def test_matches_definition(self, small_topologies):
        for space in small_topologies[::7]:
            for m in range(space.full + 1):
                assert space.derivative(m) == space.derivative_by_definition(m)


class TestClassify:
    def test_chain3(self, chain3_space):
        rep = chain3_space.classify()
        assert rep.scattered and rep.primal
        assert rep.cb_rank == 3
        assert rep.rank_of_point == (2, 1, 0)

    def test_indiscrete2(self):
        rep = FiniteSpace.indiscrete(2).classify()
        assert not rep.scattered and not rep.magari
        assert rep.cb_rank == 0

    def test_fork2_not_primal(self, fork2_space):
        rep = fork2_space.classify()
        assert rep.scattered and not rep.primal

    def test_report_json(self, fork2_space):
        as_json = fork2_space.classify().to_json()
        assert as_json["rank_of_point"] == [1, 0, 0]
        assert set(as_json) == {
            "scattered", "t_d", "t1", "discrete", "magari", "primal",
            "cb_rank", "rank_of_point",
        }


class TestPlusTopology:
    def test_discrete_fixed(self):
        d = FiniteSpace.discrete(3)
        assert d.plus_topology() == d

    def test_fork_becomes_discrete(self, fork2_space):
        assert fork2_space.plus_topology() == FiniteSpace.discrete(3)

    def test_chain_becomes_discrete(self, chain3_space):
        assert chain3_space.plus_topology() == FiniteSpace.discrete(3)


class TestDsum:
    def test_point_plugs_change_nothing(self, fork2_space):
        total, proj = fork2_space.dsum({1: FiniteSpace.discrete(1),
                                        2: FiniteSpace.discrete(1)})
        assert total == fork2_space
        assert proj.assignment == (0, 1, 2)

    def test_fork_at_leaf(self, fork2_space):
        total, proj = fork2_space.dsum({1: fork2_space})
        # root below {subfork, leaf}: compare with the composite tree's space
        from glptopo import kripke as kr

        composite = kr.tree_dsum(kr.fork(2), {1: kr.fork(2)})
        assert total == composite.to_space()
        assert total.n == 5

    def test_projection_is_onto_dmap_for_discrete_plugs(self, fork2_space):
        total, proj = fork2_space.dsum({1: FiniteSpace.discrete(2)})
        assert proj.is_onto
        assert is_dmap(proj).ok

    def test_projection_fiber_carries_plug_topology(self, fork2_space):
        # with a non-discrete plug the projection is continuous and open but
        # not pointwise discrete: the fiber is the plugged space itself
        total, proj = fork2_space.dsum({1: fork2_space})
        assert proj.is_onto
        report = is_dmap(proj)
        assert report.failure == "fiber"
        assert report.witness[0] == 1
        for u in fork2_space.opens:
            assert proj.preimage_mask(u) in total.opens_set
        for u in total.opens:
            assert proj.apply_mask(u) in fork2_space.opens_set

    def test_rejects_non_isolated_keys(self, fork2_space):
        with pytest.raises(ValueError):
            fork2_space.dsum({0: FiniteSpace.discrete(1)})


class TestIsDmap:
    def test_identity(self, fork2_space):
        ident = PointMap(fork2_space, fork2_space, (0, 1, 2))
        assert is_dmap(ident).ok

    def test_rank_map_of_chain(self, chain3_space):
        rm = chain3_space.rank_map()
        assert is_dmap(rm).ok
        assert rm.target == FiniteSpace.chain_left(3)

    def test_collapsing_sierpinski_fails_on_fiber(self, sierpinski):
        collapse = PointMap(sierpinski, FiniteSpace.discrete(1), (0, 0))
        report = is_dmap(collapse)
        assert not report.ok
        assert report.failure == "fiber"
        assert report.witness == (0, 0b11)

    def test_non_open_map(self, sierpinski):
        # swap of Sierpinski points is not continuous
        swap = PointMap(sierpinski, sierpinski, (1, 0))
        report = is_dmap(swap)
        assert not report.ok
        assert report.failure in ("continuity", "openness")


class TestRankMap:
    def test_chain(self, chain3_space):
        rm = chain3_space.rank_map()
        assert rm.assignment == (2, 1, 0)

    def test_point(self):
        rm = FiniteSpace.discrete(1).rank_map()
        assert rm.assignment == (0,)
        assert rm.target.n == 1

    def test_fork(self, fork2_space):
        rm = fork2_space.rank_map()
        assert rm.assignment == (1, 0, 0)
        assert rm.target == FiniteSpace.chain_left(2)

    def test_rejects_unscattered(self):
        with pytest.raises(ValueError):
            FiniteSpace.indiscrete(2).rank_map()


class TestReflexivePoints:
    def test_scattered_doubly_empty(self, chain3_space, fork2_space):
        # limit points of the (discrete) plus topology: none
        assert chain3_space.reflexive_points(2) == 0
        assert fork2_space.reflexive_points(2) == 0

    def test_requires_t_d(self):
        with pytest.raises(ValueError):
            FiniteSpace.indiscrete(2).reflexive_points(1)

    def test_point_space(self):
        assert FiniteSpace.discrete(1).reflexive_points(1) == 0

    def test_cap(self, fork2_space):
        with pytest.raises(CapExceeded):
            fork2_space.reflexive_points(2, cap=3)


class TestCheckGlpSpace:
    def test_tau_plus_pair(self, fork2_space):
        report = check_glp_space([fork2_space, fork2_space.plus_topology()])
        assert report.ok

    def test_discrete_pair(self):
        d = FiniteSpace.discrete(2)
        assert check_glp_space([d, d]).ok

    def test_repeated_fork_fails_d1(self, fork2_space):
        report = check_glp_space([fork2_space, fork2_space])
        assert not report.ok
        pair = report.pairs[0]
        assert not pair.derivative_sets_open
        # the witness derivative set is genuinely non-open in the second level
        witness = pair.d1_witness
        assert fork2_space.derivative(witness) not in fork2_space.opens_set
        assert pair.refines

    def test_rejects_mismatched_carriers(self, fork2_space):
        with pytest.raises(ValueError):
            check_glp_space([fork2_space, FiniteSpace.discrete(2)])


class TestTopologyFromOperator:
    def test_one_point_discrete(self):
        space = topology_from_operator(1, [0, 0])
        assert space == FiniteSpace.discrete(1)

    def test_round_trip_chain(self, chain3_space):
        delta = chain3_space.derivative_table()
        assert topology_from_operator(3, delta) == chain3_space

    def test_round_trip_all_small(self, small_topologies):
        for space in small_topologies[::5]:
            rep = space.classify()
            delta = space.derivative_table()
            if rep.magari:
                assert topology_from_operator(space.n, delta) == space
            else:
                with pytest.raises(MagariViolation):
                    topology_from_operator(space.n, delta)

    def test_m2_violation(self):
        full = 0b11
        delta = [0 if m == 0 else full for m in range(4)]
        with pytest.raises(MagariViolation) as err:
            topology_from_operator(2, delta)
        assert err.value.axiom == "M2"


class TestModelCheck:
    def test_top(self, fork2_space):
        assert model_check([fork2_space], {}, fm.TOP) == fork2_space.full

    def test_dia_top(self, fork2_space):
        assert model_check([fork2_space], {}, fm.parse("<0>T")) == M([0])

    def test_double_dia(self, chain3_space):
        assert model_check([chain3_space], {}, fm.parse("<0><0>T")) == M([0])

    def test_box_dual(self, fork2_space):
        direct = model_check([fork2_space], {"p": M([1])}, fm.parse("[0]p"))
        dual = model_check([fork2_space], {"p": M([1])}, fm.parse("~<0>~p"))
        assert direct == dual

    def test_multi_topology(self, fork2_space):
        spaces = [fork2_space, fork2_space.plus_topology()]
        # <1>T is empty in the discrete refinement
        assert model_check(spaces, {}, fm.parse("<1>T")) == 0
        assert model_check(spaces, {}, fm.parse("<0>T")) == M([0])

    def test_index_out_of_range(self, fork2_space):
        with pytest.raises(ValueError):
            model_check([fork2_space], {}, fm.parse("<1>T"))

    def test_unvalued_variable(self, fork2_space):
        with pytest.raises(ValueError):
            model_check([fork2_space], {}, fm.parse("p"))


class TestValidates:
    def test_lob_on_scattered(self, chain3_space, fork2_space):
        for space in (chain3_space, fork2_space):
            assert validates([space], fm.lob_schema()).valid

    def test_lin_fails_on_fork_with_witness(self, fork2_space):
        res = validates([fork2_space], fm.lin_schema())
        assert not res.valid
        # the two leaf opens split the punctured root neighborhood; refuted at r
        assert res.point == 0
        truth = model_check([fork2_space], res.valuation, fm.lin_schema())
        assert not truth >> res.point & 1

    def test_lin_on_chain(self, chain3_space):
        assert validates([chain3_space], fm.lin_schema()).valid

    def test_cap(self, fork2_space):
        with pytest.raises(CapExceeded):
            validates([fork2_space], fm.lin_schema(), cap=10)


class TestValidation:
    def test_family_must_be_closed(self):
        with pytest.raises(ValueError):
            FiniteSpace(3, [0, M([0]), M([1]), M([0, 1, 2])])

    def test_must_contain_bounds(self):
        with pytest.raises(ValueError):
            FiniteSpace(2, [0, M([0])])

    def test_json_round_trip(self, fork2_space):
        data = fork2_space.to_json()
        assert FiniteSpace.from_opens(data["points"], data["opens"]) == fork2_space
