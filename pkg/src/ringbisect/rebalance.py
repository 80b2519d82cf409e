"""Global rebalancing: sparsify a perfectly balanced cut-edge set to at most
``2k`` edges while keeping the coloring (1 + 1/k)-balanced.

The procedure repeatedly removes the pair of cut-edges bounding the smallest
monochromatic arc of the currently more-frequent color.  Removing such a pair
recolors that arc to the other color, so the imbalance introduced per
iteration is the arc length.  With ``2j`` edges remaining, the minority color
always keeps at least ``n/2 - n/(2j)`` nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ring import CutEdgeSet, canonical_bits, less_count


@dataclass(frozen=True)
class RebalanceStep:
    removed_pair: tuple[int, int]
    arc_size: int
    less_after: int


@dataclass(frozen=True)
class RebalanceTrace:
    n: int
    steps: tuple[RebalanceStep, ...]


def global_rebalance(cuts: CutEdgeSet, k: int) -> tuple[CutEdgeSet, RebalanceTrace]:
    """Select a subset of ``cuts`` of size ``min(2k, |cuts|)`` that is
    (1 + 1/k)-balanced.

    Requires a 1-balanced input.  Tie-breaks: at a color-frequency tie the
    canonical RED (color of node 0) is treated as more frequent; among equal
    smallest arcs the one with the lowest start-edge index is removed.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = cuts.n
    if less_count(cuts) != n // 2:
        raise ValueError("global rebalancing requires a 1-balanced cut-edge set")

    current = list(cuts.edges)
    steps: list[RebalanceStep] = []
    while len(current) > 2 * k:
        bits = canonical_bits(CutEdgeSet(n, tuple(current)))  # bit set = BLUE
        blues = bits.bit_count()
        more = 1 if blues > n - blues else 0  # RED wins the frequency tie

        best = None  # (arc_size, start_edge, pair_index)
        m = len(current)
        for i in range(m):
            c_i = current[i]
            c_next = current[(i + 1) % m]
            if (bits >> ((c_i + 1) % n)) & 1 != more:
                continue
            size = (c_next - c_i) % n
            if best is None or (size, c_i) < best[:2]:
                best = (size, c_i, i)
        assert best is not None  # a more-frequent arc always exists
        size, c_i, i = best
        c_next = current[(i + 1) % m]
        current = sorted(set(current) - {c_i, c_next})
        steps.append(
            RebalanceStep((c_i, c_next), size, less_count(CutEdgeSet(n, tuple(current))))
        )

    return CutEdgeSet(n, tuple(current)), RebalanceTrace(n, tuple(steps))
