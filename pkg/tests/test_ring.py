"""Ring primitives: cut-edge sets, colorings, arcs, the potential set, and
single-node flips.  Expected values are either tiny enough to read off the
ring by hand or cross-checked against brute force over labeled colorings.
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ringbisect.ring import (
    Arc,
    Color,
    CutEdgeSet,
    StepKind,
    arc_between,
    arc_distance,
    canonical_bits,
    check_ring_size,
    clockwise_arc,
    coloring_of,
    cut_edges_of,
    flip_node,
    is_alpha_balanced,
    less_count,
    phi,
    state_distance,
)

R, B = Color.RED, Color.BLUE


def all_valid_states(n):
    out = []
    for size in range(0, n + 1, 2):
        for edges in itertools.combinations(range(n), size):
            out.append(CutEdgeSet(n, edges))
    return out


def brute_distance(a, b):
    differ = sum(1 for x, y in zip(coloring_of(a), coloring_of(b)) if x != y)
    return min(differ, a.n - differ)


class TestCutEdgeSet:
    def test_rejects_odd_ring_and_small_ring(self):
        for n in (3, 5, 7, 2, 0, -4):
            with pytest.raises(ValueError):
                check_ring_size(n)

    def test_rejects_odd_cardinality(self):
        with pytest.raises(ValueError):
            CutEdgeSet(8, (3,))

    def test_rejects_out_of_range_and_duplicates(self):
        with pytest.raises(ValueError):
            CutEdgeSet(8, (3, 8))
        with pytest.raises(ValueError):
            CutEdgeSet(8, (3, 3))
        with pytest.raises(ValueError):
            CutEdgeSet(8, (5, 3))  # must be strictly increasing

    def test_of_sorts(self):
        assert CutEdgeSet.of(8, [6, 1]).edges == (1, 6)

    def test_membership_and_len(self):
        c = CutEdgeSet(8, (1, 6))
        assert 1 in c and 6 in c and 3 not in c
        assert len(c) == 2


class TestColorings:
    def test_cut_edges_of_bisection(self):
        colors = [R] * 4 + [B] * 4
        assert cut_edges_of(colors).edges == (3, 7)

    def test_cut_edges_of_alternating(self):
        colors = [R, B] * 4
        assert cut_edges_of(colors).edges == (0, 1, 2, 3, 4, 5, 6, 7)

    def test_coloring_roundtrip_exhaustive_n8(self):
        for cuts in all_valid_states(8):
            assert cut_edges_of(coloring_of(cuts)) == cuts

    def test_coloring_complement(self):
        cuts = CutEdgeSet(8, (4, 6))
        # Canonical (node 0 red): nodes 0-4 red, 5-6 blue, 7 red again.
        assert coloring_of(cuts) == [R, R, R, R, R, B, B, R]
        assert coloring_of(cuts, B) == [B, B, B, B, B, R, R, B]

    def test_canonical_bits(self):
        cuts = CutEdgeSet(8, (4, 6))
        assert canonical_bits(cuts) == (1 << 5) | (1 << 6)
        assert canonical_bits(CutEdgeSet(8, ())) == 0

    def test_less_count(self):
        assert less_count(CutEdgeSet(8, (4, 6))) == 2
        assert less_count(CutEdgeSet(8, (3, 7))) == 4
        assert less_count(CutEdgeSet(8, ())) == 0

    def test_alpha_balance(self):
        bisection = CutEdgeSet(8, (3, 7))
        lopsided = CutEdgeSet(8, (4, 6))  # 6 vs 2 split
        assert is_alpha_balanced(bisection, 1)
        assert not is_alpha_balanced(lopsided, 1)
        assert is_alpha_balanced(lopsided, Fraction(3, 2))
        assert not is_alpha_balanced(CutEdgeSet(8, ()), Fraction(3, 2))
        assert is_alpha_balanced(CutEdgeSet(8, ()), 2)

    def test_alpha_below_one_rejected(self):
        with pytest.raises(ValueError):
            is_alpha_balanced(CutEdgeSet(8, (3, 7)), Fraction(1, 2))


class TestArcs:
    def test_clockwise_arc_nodes(self):
        arc = clockwise_arc(8, 2, 5)
        assert arc.nodes == (3, 4, 5)
        assert clockwise_arc(8, 5, 2).nodes == (6, 7, 0, 1, 2)

    def test_arc_between_takes_shorter_side(self):
        assert arc_between(8, 2, 4).nodes == (3, 4)
        assert arc_between(8, 4, 2).nodes == (3, 4)
        assert arc_distance(8, 1, 7) == 2  # wraps: nodes 0 and 1... via 7->1
        assert arc_between(8, 7, 1).nodes == (0, 1)

    def test_arc_between_tie_is_clockwise_from_first(self):
        arc = arc_between(8, 0, 4)
        assert arc.nodes == (1, 2, 3, 4)
        assert arc_between(8, 4, 0).nodes == (5, 6, 7, 0)

    def test_same_edge_rejected(self):
        with pytest.raises(ValueError):
            arc_between(8, 3, 3)

    def test_arc_distance_symmetric(self):
        for n in (4, 6, 8, 10):
            for i in range(n):
                for j in range(n):
                    if i != j:
                        assert arc_distance(n, i, j) == arc_distance(n, j, i)
                        assert 1 <= arc_distance(n, i, j) <= n // 2


class TestPhi:
    def test_identical_states(self):
        c = CutEdgeSet(8, (1, 6))
        p = phi(c, c)
        assert p.size == 0 and p.constituent_arcs == ()

    def test_single_arc(self):
        a = CutEdgeSet(8, (2, 6))
        b = CutEdgeSet(8, (2, 4))
        p = phi(a, b)
        # Symmetric difference {4, 6}; recoloring nodes 5, 6 maps one to the other.
        assert p.nodes == frozenset({5, 6})

    def test_two_arc_alternation(self):
        a = CutEdgeSet(8, (0, 2, 4, 6))
        b = CutEdgeSet(8, ())
        p = phi(a, b)
        assert p.size == 4
        assert p.nodes in (frozenset({1, 2, 5, 6}), frozenset({3, 4, 7, 0}))
        # Size tie between the two alternations: the one starting at the
        # lowest diff edge wins.
        assert p.nodes == frozenset({1, 2, 5, 6})

    def test_phi_equals_brute_force_exhaustive_n6(self):
        states = all_valid_states(6)
        for a in states:
            for b in states:
                assert state_distance(a, b) == brute_distance(a, b)

    def test_arcs_partition_nodes(self):
        a = CutEdgeSet(10, (0, 3, 5, 8))
        b = CutEdgeSet(10, (1, 9))
        p = phi(a, b)
        covered = [v for arc in p.constituent_arcs for v in arc.nodes]
        assert len(covered) == len(set(covered)) == p.size
        assert frozenset(covered) == p.nodes

    def test_mismatched_sizes_rejected(self):
        with pytest.raises(ValueError):
            phi(CutEdgeSet(8, ()), CutEdgeSet(10, ()))

    @given(st.data())
    @settings(max_examples=200, deadline=None)
    def test_distance_metric_properties(self, data):
        n = data.draw(st.sampled_from([4, 6, 8, 10]))
        states = all_valid_states(n)
        a = data.draw(st.sampled_from(states))
        b = data.draw(st.sampled_from(states))
        c = data.draw(st.sampled_from(states))
        assert state_distance(a, b) == state_distance(b, a)
        assert (state_distance(a, b) == 0) == (a == b)
        assert state_distance(a, c) <= state_distance(a, b) + state_distance(b, c)


class TestFlipNode:
    def test_shift(self):
        cuts = CutEdgeSet(8, (2, 6))
        result, step = flip_node(cuts, 3)
        assert result.edges == (3, 6)
        assert step.kind is StepKind.SHIFT
        assert step.removed == (2,) and step.added == (3,)

    def test_add_pair(self):
        cuts = CutEdgeSet(8, (2, 6))
        result, step = flip_node(cuts, 0)
        assert result.edges == (0, 2, 6, 7)
        assert step.kind is StepKind.ADD_PAIR
        assert set(step.added) == {7, 0}

    def test_remove_pair(self):
        cuts = CutEdgeSet(8, (2, 3, 6, 7))
        result, step = flip_node(cuts, 3)
        assert result.edges == (6, 7)
        assert step.kind is StepKind.REMOVE_PAIR
        assert set(step.removed) == {2, 3}

    def test_flip_changes_distance_by_one(self):
        for cuts in all_valid_states(8):
            for w in range(8):
                result, _ = flip_node(cuts, w)
                assert state_distance(cuts, result) == 1

    def test_flip_is_involution(self):
        cuts = CutEdgeSet(10, (1, 4, 5, 8))
        for w in range(10):
            once, _ = flip_node(cuts, w)
            twice, _ = flip_node(once, w)
            assert twice == cuts

    def test_out_of_range_node(self):
        with pytest.raises(ValueError):
            flip_node(CutEdgeSet(8, ()), 8)
