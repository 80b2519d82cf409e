"""Global rebalancing: postconditions, trace invariants, and tie-break
behavior.  Expected outputs for the small fixed cases were worked out on the
ring by hand; the randomized checks assert the provable guarantees directly.
"""

from fractions import Fraction

import numpy as np
import pytest

from ringbisect.harness import check_rebalance_postconditions
from ringbisect.rebalance import global_rebalance
from ringbisect.ring import Color, CutEdgeSet, cut_edges_of, less_count


def random_bisection(n, rng):
    colors = [Color.RED] * (n // 2) + [Color.BLUE] * (n // 2)
    rng.shuffle(colors)
    return cut_edges_of(colors)


class TestSmallCases:
    def test_already_sparse_is_unchanged(self):
        cuts = CutEdgeSet(8, (3, 7))
        result, trace = global_rebalance(cuts, 1)
        assert result == cuts
        assert trace.steps == ()

    def test_alternating_n8_k1(self):
        # C = {0,2,4,6}: singleton red arcs after edges 2 and 6, singleton
        # blue arcs after 0 and 4.  Red is canonically more frequent at the
        # 4-4 tie; the red arc with the lower start edge, (2,4), goes first.
        cuts = CutEdgeSet(8, (0, 2, 4, 6))
        result, trace = global_rebalance(cuts, 1)
        assert trace.steps[0].removed_pair == (2, 4)
        assert result.edges == (0, 6)
        assert less_count(result) == 2

    def test_alternating_n8_k2_noop(self):
        cuts = CutEdgeSet(8, (0, 2, 4, 6))
        result, _ = global_rebalance(cuts, 2)
        assert result == cuts

    def test_n12_single_iteration(self):
        # Blocks of two: red {0,1}, blue {2,3}, ... perfectly balanced.
        cuts = CutEdgeSet(12, (1, 3, 5, 7, 9, 11))
        result, trace = global_rebalance(cuts, 2)
        assert len(result) == 4
        assert len(trace.steps) == 1
        assert trace.steps[0].arc_size == 2
        # Removing one red arc of size 2 leaves 4 red vs 8 blue nodes.
        assert less_count(result) == 4

    def test_input_must_be_balanced(self):
        with pytest.raises(ValueError):
            global_rebalance(CutEdgeSet(8, (4, 6)), 1)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            global_rebalance(CutEdgeSet(8, (3, 7)), 0)


class TestPostconditions:
    @pytest.mark.parametrize("n", range(4, 25, 2))
    def test_random_bisections(self, n):
        rng = np.random.default_rng(n)
        for _ in range(60):
            cuts = random_bisection(n, rng)
            for k in range(1, 5):
                err = check_rebalance_postconditions(cuts, k)
                assert err is None, f"n={n} k={k} C={cuts.edges}: {err}"

    def test_output_subset_and_size(self):
        rng = np.random.default_rng(7)
        for _ in range(40):
            cuts = random_bisection(16, rng)
            for k in (1, 2, 3):
                result, _ = global_rebalance(cuts, k)
                assert set(result.edges) <= set(cuts.edges)
                assert len(result) == min(2 * k, len(cuts))

    def test_minority_floor(self):
        # less >= n/2 - n/(2k) after sparsifying to 2k edges.
        rng = np.random.default_rng(11)
        for n in (10, 20, 30):
            for _ in range(30):
                cuts = random_bisection(n, rng)
                for k in (1, 2, 3):
                    result, _ = global_rebalance(cuts, k)
                    assert less_count(result) >= Fraction(n, 2) - Fraction(n, 2 * k)

    def test_trace_invariant_every_iteration(self):
        # With 2j edges remaining, less >= n/2 - n/(2j); and each removed
        # arc obeys the size bound n/(2j) + n/(2j^2) for the j before removal.
        rng = np.random.default_rng(13)
        for _ in range(25):
            cuts = random_bisection(24, rng)
            _, trace = global_rebalance(cuts, 1)
            edges_left = len(cuts)
            for step in trace.steps:
                j_before = edges_left // 2
                assert step.arc_size <= Fraction(24, 2 * j_before) + Fraction(
                    24, 2 * j_before * j_before
                )
                edges_left -= 2
                j = edges_left // 2
                assert step.less_after >= Fraction(24, 2) - Fraction(24, 2 * j)
