"""Ring topology primitives: colorings, cut-edge sets, arcs, and the
potential / edit-distance between two-cluster partition states.

Conventions used throughout the package:

* nodes are ``0 .. n-1`` clockwise, ``n`` even and at least 4;
* edge ``i`` connects node ``i`` and node ``(i+1) % n``;
* a partition state is a valid (even-cardinality) set of cut-edges and is
  label-free: the two colorings it induces differ by a color swap;
* where a labeled coloring is needed, the canonical anchor is node 0 = RED.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, float, Fraction]


class Color(enum.IntEnum):
    RED = 0
    BLUE = 1

    def flipped(self) -> "Color":
        return Color.BLUE if self is Color.RED else Color.RED


def check_ring_size(n: int) -> int:
    if n < 4 or n % 2 != 0:
        raise ValueError(f"ring size must be even and >= 4, got {n}")
    return n


@dataclass(frozen=True)
class CutEdgeSet:
    """A valid set of cut-edges on a ring of ``n`` nodes.

    Represents a two-coloring up to a swap of the color names.  ``edges``
    is strictly increasing, all indices in ``[0, n)``, even cardinality.
    """

    n: int
    edges: tuple[int, ...]

    def __post_init__(self):
        check_ring_size(self.n)
        object.__setattr__(self, "edges", tuple(self.edges))
        if len(self.edges) % 2 != 0:
            raise ValueError(f"cut-edge set must have even cardinality: {self.edges}")
        prev = -1
        for e in self.edges:
            if not 0 <= e < self.n:
                raise ValueError(f"edge index {e} out of range for n={self.n}")
            if e <= prev:
                raise ValueError(f"edges must be strictly increasing: {self.edges}")
            prev = e

    @classmethod
    def of(cls, n: int, edges: Iterable[int]) -> "CutEdgeSet":
        return cls(n, tuple(sorted(edges)))

    def __len__(self) -> int:
        return len(self.edges)

    def __contains__(self, edge: int) -> bool:
        return edge in self.edges

    def sort_key(self) -> tuple[int, ...]:
        """Lexicographic tie-break key (shorter tuples sort first on prefix)."""
        return self.edges


@dataclass(frozen=True)
class Arc:
    """A clockwise run of consecutive nodes strictly between two ring edges.

    ``nodes`` lists the nodes in clockwise sweep order, starting at
    ``(start_edge + 1) % n``.
    """

    n: int
    start_edge: int
    end_edge: int
    nodes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class PhiSet:
    """The potential set between two partition states.

    The union of the constituent arcs equals ``nodes``; every arc endpoint
    lies in the symmetric difference of the two cut-edge sets.
    """

    n: int
    nodes: frozenset[int]
    constituent_arcs: tuple[Arc, ...]

    @property
    def size(self) -> int:
        return len(self.nodes)


class StepKind(enum.Enum):
    SHIFT = "shift"
    ADD_PAIR = "add_pair"
    REMOVE_PAIR = "remove_pair"


@dataclass(frozen=True)
class FlipStep:
    """Classification of a single-node recoloring by its cut-edge effect."""

    kind: StepKind
    node: int
    removed: tuple[int, ...]
    added: tuple[int, ...]


def cut_edges_of(colors: Sequence[Color]) -> CutEdgeSet:
    """Edges of the ring whose endpoints have different colors."""
    n = check_ring_size(len(colors))
    edges = tuple(i for i in range(n) if colors[i] != colors[(i + 1) % n])
    return CutEdgeSet(n, edges)


def coloring_of(cuts: CutEdgeSet, node0_color: Color = Color.RED) -> list[Color]:
    """The labeled coloring realizing ``cuts`` with the given color at node 0.

    The two choices of ``node0_color`` give complementary colorings.
    """
    colors = [node0_color] * cuts.n
    cur = node0_color
    cut = set(cuts.edges)
    for i in range(cuts.n - 1):
        if i in cut:
            cur = cur.flipped()
        colors[i + 1] = cur
    return colors


def canonical_bits(cuts: CutEdgeSet) -> int:
    """Canonical coloring (node 0 = RED) packed as a bitmask, bit i = node i is BLUE.

    The color is constant between cut-edges, so whole segments are set at
    once.  Crossing edge i flips the color from node i+1 on; the edge n-1
    only closes the ring and flips nothing further.
    """
    bits = 0
    cur = 0
    prev = -1  # last cut-edge crossed; current segment starts at prev + 1
    for e in cuts.edges:
        if cur:
            bits |= ((1 << (e - prev)) - 1) << (prev + 1)
        cur ^= 1
        prev = e
    if cur:
        bits |= ((1 << (cuts.n - 1 - prev)) - 1) << (prev + 1)
    return bits


def less_count(cuts: CutEdgeSet) -> int:
    """Number of nodes of the less frequent color (n/2 at a tie)."""
    blues = canonical_bits(cuts).bit_count()
    return min(blues, cuts.n - blues)


def is_alpha_balanced(cuts: CutEdgeSet, alpha: Rational) -> bool:
    """True iff each color has at most ``alpha * n/2`` nodes."""
    alpha = Fraction(alpha)
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    return cuts.n - less_count(cuts) <= alpha * Fraction(cuts.n, 2)


def clockwise_arc(n: int, start_edge: int, end_edge: int) -> Arc:
    """All nodes strictly between the two edges going clockwise from ``start_edge``."""
    if start_edge == end_edge:
        raise ValueError("arc endpoints must be distinct edges")
    length = (end_edge - start_edge) % n
    nodes = tuple((start_edge + 1 + t) % n for t in range(length))
    return Arc(n, start_edge, end_edge, nodes)


def arc_between(n: int, e_i: int, e_j: int) -> Arc:
    """Nodes on the shorter ring path between two distinct edges.

    At a tie between the two directions, the clockwise arc from ``e_i`` is
    chosen.
    """
    check_ring_size(n)
    if e_i == e_j:
        raise ValueError("arc between an edge and itself is undefined")
    cw = (e_j - e_i) % n
    ccw = (e_i - e_j) % n
    if cw <= ccw:
        return clockwise_arc(n, e_i, e_j)
    return clockwise_arc(n, e_j, e_i)


def arc_distance(n: int, e_i: int, e_j: int) -> int:
    return len(arc_between(n, e_i, e_j))


def phi(c_ref: CutEdgeSet, c_other: CutEdgeSet) -> PhiSet:
    """The smaller of the two alternating-arc node sets over the symmetric
    difference of the cut-edge sets.

    Its cardinality is the minimum number of node recolorings that make the
    induced colorings identical or completely opposite.  Alternation starts
    from the lowest edge index in the symmetric difference; at a size tie
    the even-indexed alternation is returned.
    """
    if c_ref.n != c_other.n:
        raise ValueError(f"mismatched ring sizes: {c_ref.n} != {c_other.n}")
    n = c_ref.n
    diff = sorted(set(c_ref.edges) ^ set(c_other.edges))
    if not diff:
        return PhiSet(n, frozenset(), ())
    m = len(diff)  # even: both sets have even cardinality
    phi0 = tuple(clockwise_arc(n, diff[i], diff[i + 1]) for i in range(0, m, 2))
    phi1 = tuple(clockwise_arc(n, diff[i], diff[(i + 1) % m]) for i in range(1, m, 2))
    size0 = sum(len(a) for a in phi0)
    size1 = sum(len(a) for a in phi1)
    chosen = phi0 if size0 <= size1 else phi1
    arcs = tuple(sorted(chosen, key=lambda a: a.start_edge))
    nodes = frozenset(v for a in arcs for v in a.nodes)
    return PhiSet(n, nodes, arcs)


def state_distance(c1: CutEdgeSet, c2: CutEdgeSet) -> int:
    """Minimum number of node recolorings transforming one state into the other."""
    return phi(c1, c2).size


def flip_node(cuts: CutEdgeSet, w: int) -> tuple[CutEdgeSet, FlipStep]:
    """Recolor a single node: toggles the two edges adjacent to ``w``."""
    n = cuts.n
    if not 0 <= w < n:
        raise ValueError(f"node {w} out of range for n={n}")
    a, b = (w - 1) % n, w
    present = set(cuts.edges)
    in_a, in_b = a in present, b in present
    present ^= {a, b}
    result = CutEdgeSet.of(n, present)
    if in_a and in_b:
        step = FlipStep(StepKind.REMOVE_PAIR, w, (a, b), ())
    elif not in_a and not in_b:
        step = FlipStep(StepKind.ADD_PAIR, w, (), (a, b))
    elif in_a:
        step = FlipStep(StepKind.SHIFT, w, (a,), (b,))
    else:
        step = FlipStep(StepKind.SHIFT, w, (b,), (a,))
    return result, step
