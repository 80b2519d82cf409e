"""Exact offline optimum by dynamic programming over enumerated partition
states, plus the single-node decomposition of a multi-node recoloring.

Cost model: serving request ``e`` in state ``s`` pays a hit of 1 iff ``e``
is a cut-edge of ``s``; the recoloring that follows pays the edit distance
to the next state.  The DP minimizes the sum of both over the sequence.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .rebalance import global_rebalance
from .ring import CutEdgeSet, Rational, canonical_bits, flip_node, is_alpha_balanced, phi

_INF = np.int64(1) << 40


@dataclass(frozen=True)
class StateSpace:
    """Complete, duplicate-free enumeration of valid cut-edge sets with at
    most ``max_cut`` edges that are ``alpha``-balanced.

    States are sorted lexicographically by edge tuple; DP tie-breaks resolve
    to the first (smallest) index.
    """

    n: int
    max_cut: Optional[int]
    alpha: Fraction
    states: tuple[CutEdgeSet, ...]

    def __len__(self) -> int:
        return len(self.states)

    def __hash__(self) -> int:
        # Cached: spaces key several lru_caches and the states tuple is large.
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.n, self.max_cut, self.alpha, self.states))
            object.__setattr__(self, "_hash", h)
        return h

    def index_of(self, state: CutEdgeSet) -> int:
        return _index_map(self)[state.edges]


@lru_cache(maxsize=None)
def _index_map(space: StateSpace) -> dict:
    return {s.edges: i for i, s in enumerate(space.states)}


def enumerate_states(n: int, max_cut: Optional[int], alpha: Rational) -> StateSpace:
    """All valid ``alpha``-balanced cut-edge sets of cardinality up to
    ``max_cut`` (no limit if ``None``)."""
    alpha = Fraction(alpha)
    limit = n if max_cut is None else min(max_cut, n)
    states = []
    for size in range(0, limit + 1, 2):
        for combo in itertools.combinations(range(n), size):
            s = CutEdgeSet(n, combo)
            if is_alpha_balanced(s, alpha):
                states.append(s)
    states.sort(key=lambda s: s.edges)
    return StateSpace(n, max_cut, alpha, tuple(states))


@lru_cache(maxsize=64)
def _state_bits(space: StateSpace) -> np.ndarray:
    return np.array([canonical_bits(s) for s in space.states], dtype=np.int64)


@lru_cache(maxsize=64)
def distance_matrix(space: StateSpace) -> np.ndarray:
    """Pairwise edit distances between states, as min over the two labelings
    of the Hamming distance between canonical colorings."""
    n = space.n
    bits = _state_bits(space)
    cols = ((bits[:, None] >> np.arange(n)[None, :]) & 1).astype(np.int8)
    ham = (cols[:, None, :] != cols[None, :, :]).sum(axis=2, dtype=np.int64)
    return np.minimum(ham, n - ham)


@lru_cache(maxsize=16)
def _flip_index_tables(n: int) -> tuple[np.ndarray, ...]:
    idx = np.arange(1 << n)
    return tuple(idx ^ (1 << i) for i in range(n))


_INF = np.int64(1) << 40


def minplus_distance(space: StateSpace, values: np.ndarray) -> np.ndarray:
    """``out[s] = min_j values[j] + d(state_j, state_s)`` for int costs.

    Runs a separable distance transform over the hypercube of colorings
    (one relaxation pass per node, since a single-node flip costs 1), which
    is much faster than a dense min over the distance matrix for the state
    counts that arise here.  Each state seeds both of its colorings, so the
    min over the two labelings is taken automatically.
    """
    n = space.n
    if n > 20:
        return (distance_matrix(space) + values[None, :]).min(axis=1)
    bits = _state_bits(space)
    table = np.full(1 << n, _INF, dtype=np.int64)
    # The canonical coloring has node 0 red (bit 0 clear), its complement has
    # bit 0 set, so the two seed positions never collide across states.
    table[bits] = values
    table[bits ^ ((1 << n) - 1)] = values
    for flipped in _flip_index_tables(n):
        np.minimum(table, table[flipped] + 1, out=table)
    return table[bits]


@lru_cache(maxsize=64)
def membership_matrix(space: StateSpace) -> np.ndarray:
    """Boolean matrix, entry (s, e) true iff edge e is a cut-edge of state s."""
    mat = np.zeros((len(space.states), space.n), dtype=bool)
    for i, s in enumerate(space.states):
        mat[i, list(s.edges)] = True
    return mat


@dataclass(frozen=True)
class TrajectoryRecord:
    request_edge: int
    state_before_move: CutEdgeSet
    state_after_move: CutEdgeSet
    hit: int
    recolor: int


@dataclass(frozen=True)
class Trajectory:
    n: int
    initial: CutEdgeSet
    records: tuple[TrajectoryRecord, ...]

    @property
    def hit_cost(self) -> int:
        return sum(r.hit for r in self.records)

    @property
    def recolor_cost(self) -> int:
        return sum(r.recolor for r in self.records)

    @property
    def total_cost(self) -> int:
        return self.hit_cost + self.recolor_cost


def exact_opt(
    space: StateSpace, initial: CutEdgeSet, requests: Sequence[int]
) -> tuple[int, Trajectory]:
    """Minimum-cost state sequence serving ``requests`` from ``initial``.

    Backward DP over cost-to-go; the forward reconstruction breaks ties
    toward the lexicographically smallest next state.
    """
    try:
        start = space.index_of(initial)
    except KeyError:
        raise ValueError(f"initial state {initial.edges} not in state space") from None

    dist = distance_matrix(space)
    member = membership_matrix(space)
    T = len(requests)

    # cost_to_go[t][s]: optimal cost of requests t.. starting in state s.
    cost_to_go = [np.zeros(len(space), dtype=np.int64) for _ in range(T + 1)]
    for t in range(T - 1, -1, -1):
        hit = member[:, requests[t]].astype(np.int64)
        cost_to_go[t] = hit + minplus_distance(space, cost_to_go[t + 1])

    records = []
    cur = start
    for t, e in enumerate(requests):
        hit = int(member[cur, e])
        nxt = int(np.argmin(dist[cur] + cost_to_go[t + 1]))
        records.append(
            TrajectoryRecord(e, space.states[cur], space.states[nxt], hit, int(dist[cur, nxt]))
        )
        cur = nxt

    traj = Trajectory(space.n, initial, tuple(records))
    total = int(cost_to_go[0][start])
    assert traj.total_cost == total
    return total, traj


def default_initial_cuts(n: int) -> CutEdgeSet:
    """The fixed initial bisection: nodes 0..n/2-1 one color, the rest the other."""
    return CutEdgeSet(n, (n // 2 - 1, n - 1))


def restricted_opt(
    n: int,
    k: int,
    alpha: Rational,
    requests: Sequence[int],
    initial: Optional[CutEdgeSet] = None,
) -> tuple[int, Trajectory]:
    """Optimal cost within the class of algorithms using at most ``2k``
    cut-edges and an ``alpha``-balanced coloring.

    The initial 1-balanced state is globally rebalanced first; that common
    rebalancing cost is excluded from the reported total.
    """
    if initial is None:
        initial = default_initial_cuts(n)
    start, _ = global_rebalance(initial, k)
    space = enumerate_states(n, 2 * k, alpha)
    return exact_opt(space, start, requests)


def decompose_transition(c_from: CutEdgeSet, c_to: CutEdgeSet) -> tuple[int, ...]:
    """Single-node recoloring order realizing a state transition.

    Sweeps each constituent arc of the potential set clockwise, arcs taken
    in clockwise order of start edge; applying ``flip_node`` sequentially
    transforms ``c_from`` into ``c_to`` in exactly ``state_distance`` flips.
    """
    p = phi(c_from, c_to)
    return tuple(v for arc in p.constituent_arcs for v in arc.nodes)


def replay_flips(c_from: CutEdgeSet, nodes: Sequence[int]) -> CutEdgeSet:
    cur = c_from
    for w in nodes:
        cur, _ = flip_node(cur, w)
    return cur
