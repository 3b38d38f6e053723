"""Partition tree construction, verification and staging."""

import random

import pytest

from ordfrag import generators as gen
from ordfrag.errors import DomainError, InsufficientMaterialization
from ordfrag.ordinal import ZERO, from_int, parse
from ordfrag.ptree import (
    PartitionTree,
    StagedTree,
    build_tree,
    chain_order_types,
    endpoints,
    find_separating_pair,
    make_tree,
    staged_from_json,
    staged_to_dot,
    staged_to_json,
    to_staged,
    tree_from_json,
    tree_to_dot,
    tree_to_json,
    verify_admissible,
)
from ordfrag.space import (
    ClosedInterval,
    FiniteChain,
    OrderSum,
    OrdinalInterval,
    SplitChain,
    compare_points,
    interval_contains_point,
    point_key,
    render_point,
)

W = parse("w")
W2 = parse("w^2")


def intervals_of(tree):
    K = tree.space
    return sorted(
        (render_point(K, n.interval.lo), render_point(K, n.interval.hi))
        for n in tree.nodes.values()
    )


class TestBuild:
    def test_three_chain(self):
        t = build_tree(FiniteChain(3), 10)
        assert intervals_of(t) == [("0", "1"), ("0", "2"), ("1", "2")]
        root = t.nodes[t.root_id]
        assert root.level == ZERO and root.parent is None
        assert len(root.children) == 2

    def test_omega_budget_seven(self):
        t = build_tree(OrdinalInterval(W), 7)
        assert intervals_of(t) == sorted(
            [("0", "w"), ("0", "1"), ("1", "w"), ("1", "2"), ("2", "w"), ("2", "3"), ("3", "w")]
        )

    def test_omega_squared_budget_three(self):
        t = build_tree(OrdinalInterval(W2), 3)
        assert intervals_of(t) == sorted([("0", "w^2"), ("0", "w"), ("w", "w^2")])

    def test_budget_is_respected_exactly(self):
        for b in [1, 2, 3, 4, 5, 6, 7, 100]:
            t = build_tree(OrdinalInterval(W), b)
            # children come in pairs, so odd budgets fill exactly
            assert len(t.nodes) == b if b % 2 == 1 else len(t.nodes) == b - 1

    def test_finite_tree_saturates(self):
        t = build_tree(FiniteChain(8), 1000)
        # median splits at shared endpoints: 1 + 2 + 4 + 6 nodes, 7 leaves
        assert len(t.nodes) == 13
        leaves = [n for n in t.nodes.values() if not n.children]
        assert len(leaves) == 7
        assert all(n.interval.hi - n.interval.lo == 1 for n in leaves)

    def test_bad_arguments(self):
        with pytest.raises(DomainError):
            build_tree(FiniteChain(3), 0)
        with pytest.raises(DomainError):
            build_tree(FiniteChain(1), 5)

    def test_custom_split_callback(self):
        calls = []

        def leftish(space, iv):
            calls.append(iv)
            return iv.lo + 1

        t = build_tree(FiniteChain(6), 100, split=leftish)
        assert calls and verify_admissible(t).ok

    def test_split_callback_validated(self):
        with pytest.raises(DomainError):
            build_tree(FiniteChain(6), 100, split=lambda K, iv: iv.lo)


class TestVerify:
    def test_builder_output_admissible(self):
        rng = random.Random(515)
        menu = [
            FiniteChain(2),
            FiniteChain(37),
            SplitChain(9),
            OrdinalInterval(W),
            OrdinalInterval(parse("w^2*3+5")),
            OrderSum((FiniteChain(5), OrdinalInterval(W), SplitChain(3))),
        ]
        for K in menu:
            for b in [1, 3, rng.randint(4, 60), 121]:
                v = verify_admissible(build_tree(K, b))
                assert v.ok, v.violations

    def test_single_child_rejected(self):
        t = make_tree(FiniteChain(5), [(0, 0, 4, ZERO, None), (1, 0, 2, from_int(1), 0)])
        v = verify_admissible(t)
        assert not v.ok
        assert "binary-split" in v.counts

    def test_sibling_overlap_rejected(self):
        t = make_tree(
            FiniteChain(5),
            [
                (0, 0, 4, ZERO, None),
                (1, 0, 2, from_int(1), 0),
                (2, 1, 4, from_int(1), 0),
            ],
        )
        v = verify_admissible(t)
        assert not v.ok
        assert "level-overlap" in v.counts
        assert "comparability" in v.counts

    def test_equal_interval_child_breaks_reverse_inclusion(self):
        t = make_tree(FiniteChain(5), [(0, 0, 4, ZERO, None), (1, 0, 4, from_int(1), 0)])
        v = verify_admissible(t)
        assert not v.ok
        assert "reverse-inclusion" in v.counts

    def test_two_point_node_must_be_leaf(self):
        t = make_tree(
            FiniteChain(2),
            [(0, 0, 1, ZERO, None), (1, 0, 0, from_int(1), 0), (2, 0, 1, from_int(1), 0)],
        )
        v = verify_admissible(t)
        assert not v.ok
        assert "two-point-leaf" in v.counts
        assert "nontrivial" in v.counts  # the [0,0] child

    def test_root_clause(self):
        t = make_tree(FiniteChain(5), [(0, 1, 4, ZERO, None)])
        v = verify_admissible(t)
        assert not v.ok and "root" in v.counts

    def test_level_step_clause(self):
        t = make_tree(
            FiniteChain(5),
            [
                (0, 0, 4, ZERO, None),
                (1, 0, 2, from_int(2), 0),
                (2, 2, 4, from_int(2), 0),
            ],
        )
        v = verify_admissible(t)
        assert not v.ok and "level-step" in v.counts

    def test_materialized_limit_level_is_caught(self):
        K = OrdinalInterval(W2)
        t = make_tree(
            K,
            [
                (0, ZERO, W2, ZERO, None),
                (1, ZERO, W, from_int(1), 0),
                (2, W, W2, from_int(1), 0),
                (3, W, parse("w*2"), parse("w"), 2),
            ],
        )
        v = verify_admissible(t)
        assert not v.ok
        assert "limit-intersection" in v.counts

    def test_linkage_violations_short_circuit(self):
        t = PartitionTree(FiniteChain(3), {}, 0)
        assert not verify_admissible(t).ok


class TestEndpoints:
    def test_omega_two_levels(self):
        t = build_tree(OrdinalInterval(W), 5)
        K = t.space
        assert [render_point(K, p) for p in endpoints(t)] == ["0", "1", "2", "w"]

    def test_sorted_unique(self):
        t = build_tree(FiniteChain(16), 1000)
        pts = endpoints(t)
        keys = [point_key(t.space, p) for p in pts]
        assert keys == sorted(set(keys))


class TestSeparatingPair:
    def test_omega_inside_budget(self):
        t = build_tree(OrdinalInterval(W), 20)
        K = t.space
        x, y = find_separating_pair(t, from_int(3), W)
        assert compare_points(K, from_int(3), x) != "greater"
        assert compare_points(K, x, y) == "less"
        assert compare_points(K, y, W) != "greater"
        eps = {point_key(K, p) for p in endpoints(t)}
        assert point_key(K, x) in eps and point_key(K, y) in eps

    def test_insufficient_materialization(self):
        t = build_tree(OrdinalInterval(W2), 3)
        with pytest.raises(InsufficientMaterialization):
            find_separating_pair(t, parse("w+1"), parse("w*3"))

    def test_exhaustive_postcondition_finite(self):
        t = build_tree(FiniteChain(16), 1000)
        K = t.space
        eps = {point_key(K, p) for p in endpoints(t)}
        for u in range(16):
            for v in range(u + 1, 16):
                x, y = find_separating_pair(t, u, v)
                assert u <= x < y <= v
                assert point_key(K, x) in eps and point_key(K, y) in eps

    def test_requires_order(self):
        t = build_tree(FiniteChain(4), 100)
        with pytest.raises(DomainError):
            find_separating_pair(t, 2, 2)


class TestChainOrderTypes:
    def test_right_combs_grow_mins(self):
        t = build_tree(OrdinalInterval(W), 7)
        # chain [0,w] > [1,w] > [2,w]
        ids = [
            n.id
            for n in t.nodes.values()
            if render_point(t.space, n.interval.hi) == "w"
        ]
        rep = chain_order_types(t, ids)
        assert rep.ok
        assert rep.e_size == 4 and rep.f_size == 4 and rep.g_size == 1

    def test_mixed_chain(self):
        t = build_tree(FiniteChain(8), 1000)
        # walk a root-to-leaf branch, alternating sides
        path = [t.root_id]
        node = t.nodes[t.root_id]
        side = 0
        while node.children:
            node = t.nodes[node.children[side]]
            path.append(node.id)
            side = 1 - side
        rep = chain_order_types(t, path)
        assert rep.ok
        assert set(rep.f_ids) | set(rep.g_ids) == set(path)

    def test_non_chain_rejected(self):
        t = build_tree(FiniteChain(8), 1000)
        kids = t.nodes[t.root_id].children
        with pytest.raises(DomainError):
            chain_order_types(t, [kids[0], kids[1]])

    def test_duplicates_collapse(self):
        t = build_tree(FiniteChain(4), 100)
        rep = chain_order_types(t, [t.root_id, t.root_id])
        assert rep.e_size == 1


class TestStaging:
    def test_finite_chain_stage(self):
        t = build_tree(FiniteChain(8), 100)
        st = to_staged(t, 2, {0, 1})
        assert len(st.nodes()) == 7
        assert st.tops() == [3, 4, 5, 6]
        assert st.level[st.root()] == 0
        assert st.has_designated_limit
        st.validate()

    def test_single_node_stage(self):
        t = build_tree(FiniteChain(8), 100)
        st = to_staged(t, 0, set())
        assert len(st.nodes()) == 1
        assert not st.has_designated_limit  # a single level is never a limit stage

    def test_pool_must_sit_below_top(self):
        t = build_tree(FiniteChain(8), 100)
        with pytest.raises(DomainError):
            to_staged(t, 2, {0, 2})
        with pytest.raises(DomainError):
            to_staged(t, 0, {0})

    def test_unexpanded_frontier_blocks_staging(self):
        t = build_tree(OrdinalInterval(W), 5)
        with pytest.raises(InsufficientMaterialization):
            to_staged(t, 3, {0, 1})
        st = to_staged(t, 2, {1})
        assert len(st.nodes()) == 5

    def test_dead_branches_are_fine(self):
        # FiniteChain(3): level 2 exists only under the wider child
        t = build_tree(FiniteChain(3), 100)
        st = to_staged(t, 1, {0})
        assert len(st.tops()) == 2

    def test_origin_maps_back(self):
        t = build_tree(FiniteChain(8), 100)
        st = to_staged(t, 2, {0, 1})
        for new, old in st.origin.items():
            assert st.payload[new] == t.nodes[old].interval

    def test_navigation_helpers(self):
        t = build_tree(FiniteChain(8), 100)
        st = to_staged(t, 2, {0, 1})
        x = st.tops()[0]
        assert st.ancestor_at(x, 0) == st.root()
        assert st.level[st.ancestor_at(x, 1)] == 1
        seg = st.branch_segment(x, 0)
        assert seg[0] == st.root() and seg[-1] == x and len(seg) == 3
        a, b = st.tops()[0], st.tops()[-1]
        assert st.meet(a, b) == st.root()
        sibs = st.children(st.ancestor_at(x, 1))
        if len(sibs) == 2:
            assert st.meet(sibs[0], sibs[1]) == st.ancestor_at(x, 1)

    def test_validate_catches_payload_overlap(self):
        st = StagedTree(
            parent={0: None, 1: 0, 2: 0},
            level={0: 0, 1: 1, 2: 1},
            top_level=1,
            pool=frozenset({0}),
            payload={
                0: ClosedInterval(0, 4),
                1: ClosedInterval(0, 2),
                2: ClosedInterval(1, 4),
            },
            space=FiniteChain(5),
        )
        with pytest.raises(DomainError):
            st.validate()

    def test_validate_catches_limit_claim_on_single_level(self):
        st = StagedTree(parent={0: None}, level={0: 0}, top_level=0, pool=frozenset(), limit_top=True)
        with pytest.raises(DomainError):
            st.validate()


class TestSerialization:
    def test_tree_json_roundtrip(self):
        rng = random.Random(616)
        for K in [FiniteChain(9), OrdinalInterval(W2), SplitChain(4)]:
            t = build_tree(K, rng.choice([3, 15, 41]))
            doc = tree_to_json(t)
            assert doc["v"] == 1
            t2 = tree_from_json(doc)
            assert intervals_of(t2) == intervals_of(t)
            assert verify_admissible(t2).ok

    def test_staged_json_roundtrip(self):
        t = build_tree(FiniteChain(8), 100)
        st = to_staged(t, 2, {0, 1})
        doc = staged_to_json(st)
        st2 = staged_from_json(doc)
        assert st2.parent == st.parent
        assert st2.level == st.level
        assert st2.pool == st.pool
        assert st2.payload == st.payload

    def test_dot_outputs(self):
        t = build_tree(FiniteChain(4), 100)
        d = tree_to_dot(t)
        assert d.startswith("digraph") and "->" in d
        st = to_staged(t, 1, {0})
        d2 = staged_to_dot(st, cell_of={i: 0 for i in st.nodes()})
        assert "fillcolor" in d2
