import random

import pytest

from glptopo import formula as fm
from glptopo import kripke as kr
from glptopo import space as sp
from glptopo.dmap import build_dmap, cycle_domain, refute_on_ordinal, sample_domain
from glptopo.ordinal import (
    ZERO,
    ONE,
    OMEGA,
    add,
    cmp,
    ell,
    from_int,
    mul_nat,
    omega_pow,
    parse_ordinal,
    sub_left,
)

W = parse_ordinal


def expected_dom(tree):
    if tree.n == 1:
        return ONE
    return add(omega_pow(from_int(tree.height)), ONE)


class TestBuild:
    def test_fork3(self):
        f = build_dmap(kr.fork(3))
        assert str(f.dom) == "w+1"
        assert f.apply(from_int(4)) == 2  # w_{4 mod 3} is the second leaf
        assert f.apply(OMEGA) == 0

    def test_point(self):
        f = build_dmap(kr.point())
        assert f.dom == ONE
        assert f.apply(ZERO) == 0

    def test_full_binary_height2(self):
        t = kr.Tree((None, 0, 0, 1, 1, 2, 2))
        f = build_dmap(t)
        assert str(f.dom) == "w^{2}+1"

    def test_dom_formula_all_trees(self, trees_up_to_6):
        for t in trees_up_to_6:
            assert build_dmap(t).dom == expected_dom(t)


class TestApply:
    def test_block_walk_height2(self):
        t = kr.Tree((None, 0, 0, 1, 1, 2, 2))
        f = build_dmap(t)
        # second cycle block: offset w inside block 1 hits that sub-root
        assert f.apply(W("w*2")) == 2
        assert f.apply(ZERO) == 3  # first leaf of the first block
        assert f.apply(W("w")) == 1

    def test_out_of_domain(self):
        f = build_dmap(kr.fork(2))
        with pytest.raises(ValueError):
            f.apply(W("w+1"))
        with pytest.raises(ValueError):
            build_dmap(kr.point()).apply(ONE)

    def test_fork_law(self):
        for n in (1, 2, 3, 5):
            f = build_dmap(kr.fork(n))
            for k in range(101):
                assert f.apply(from_int(k)) == 1 + k % n

    def test_rank_composition_sampled(self, trees_up_to_6):
        rng = random.Random(42)
        for t in trees_up_to_6:
            f = build_dmap(t)
            heights = t.node_heights()
            for xi in sample_domain(f, rng, count=120):
                assert ell(xi) == from_int(heights[f.apply(xi)])

    def test_large_finite_coefficients(self):
        f = build_dmap(kr.fork(3))
        assert f.apply(from_int(10**9)) == 1 + (10**9 % 3)
        t = kr.Tree((None, 0, 0, 1, 1, 2, 2))
        g = build_dmap(t)
        xi = W("w*1000000000+5")
        assert g.tree.node_heights()[g.apply(xi)] == 0


class TestLeastPreimage:
    def test_fork(self):
        f = build_dmap(kr.fork(4))
        assert f.least_preimage(1) == ZERO
        assert f.least_preimage(0) == OMEGA

    def test_binary_subroot(self):
        t = kr.Tree((None, 0, 0, 1, 1, 2, 2))
        f = build_dmap(t)
        assert f.least_preimage(2) == W("w*2")

    def test_surjectivity_all_trees(self, trees_up_to_6):
        for t in trees_up_to_6:
            f = build_dmap(t)
            for node in range(t.n):
                assert f.apply(f.least_preimage(node)) == node


class TestCbPreservation:
    def test_level_sets_match_heights(self, trees_up_to_6):
        # {xi : ell(xi) >= k} = f^{-1}{nodes of height >= k} on samples
        rng = random.Random(17)
        for t in trees_up_to_6[:20]:
            f = build_dmap(t)
            heights = t.node_heights()
            for xi in sample_domain(f, rng, count=60):
                for k in range(t.height + 1):
                    lhs = cmp(ell(xi), from_int(k)) >= 0
                    rhs = heights[f.apply(xi)] >= k
                    assert lhs == rhs


class TestOrdinalDsumIdentity:
    def test_omega_powers_along_omega_plus_one(self):
        # blocks w^n+1 repeated along w+1 sum to w^{n+1}+1
        for n in range(0, 6):
            block = add(omega_pow(from_int(n)), ONE)
            q, dom = cycle_domain([block])
            assert dom == add(omega_pow(from_int(n + 1)), ONE)

    def test_matches_builder_on_unary_towers(self):
        # the same identity drives the chain tree domains
        t = kr.chain(4)
        assert build_dmap(t).dom == W("w^{3}+1")


class TestFiniteShadow:
    def test_induced_order_neighborhood_map(self, trees_up_to_6):
        """Restrict f to a finite suffix-closed sample and check the d-map
        conditions against the induced order-neighborhood structure."""
        rng = random.Random(23)
        small = [t for t in trees_up_to_6 if t.n <= 5]
        for t in small:
            f = build_dmap(t)
            samples = sorted(set(sample_domain(f, rng, count=40)),
                             key=lambda o: [str(o)])
            # order samples by ordinal comparison
            import functools
            from glptopo.ordinal import cmp as ocmp

            samples.sort(key=functools.cmp_to_key(ocmp))
            images = [f.apply(xi) for xi in samples]
            heights = t.node_heights()
            # continuity surrogate: within each half-open window between
            # consecutive samples the image height cannot exceed ell of the
            # upper endpoint (rank composition at the sampled points)
            for xi, node in zip(samples, images):
                assert ell(xi) == from_int(heights[node])
            # openness surrogate: every node of every height below a sampled
            # point's height appears among images below it in the ordering
            for i, (xi, node) in enumerate(zip(samples, images)):
                below = set(images[: i + 1])
                for h in range(heights[node]):
                    assert any(heights[m] == h for m in below)


class TestRefute:
    def test_dia_top(self):
        r = refute_on_ordinal(fm.parse("<0>T"))
        assert r.dmap.tree == kr.point()
        assert r.point == ZERO
        assert str(r.dmap.dom) == "1"

    def test_dot3_on_fork(self):
        r = refute_on_ordinal(fm.dot3_schema())
        assert kr.canonical_form(r.dmap.tree) == kr.canonical_form(kr.fork(2))
        assert r.point == OMEGA
        assert str(r.dmap.dom) == "w+1"

    def test_reflexivity_formula(self):
        r = refute_on_ordinal(fm.parse("p -> [0]p"))
        assert kr.canonical_form(r.dmap.tree) == kr.canonical_form(kr.chain(2))
        assert r.point == OMEGA
        assert str(r.dmap.dom) == "w+1"

    def test_provable_returns_none(self):
        assert refute_on_ordinal(fm.lob_schema()) is None

    def test_json_shape(self):
        r = refute_on_ordinal(fm.parse("p -> [0]p"))
        data = r.to_json()
        assert set(data) == {"formula", "tree", "dom", "point", "node", "valuation"}
        assert data["point"] == "w"
        assert data["valuation"]["p"] == [0]

    def test_points_below_omega_omega(self):
        rng = random.Random(3)
        from glptopo import sampling

        for _ in range(40):
            phi = sampling.random_formula(rng, n_vars=2, depth=2)
            r = refute_on_ordinal(phi)
            if r is None:
                continue
            assert cmp(r.point, omega_pow(OMEGA)) < 0
            assert r.dmap.apply(r.point) == r.node
