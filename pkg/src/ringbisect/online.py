"""Online solvers over the restricted state space: a deterministic
work-function algorithm and a randomized multiplicative-weights algorithm
whose successive distributions are linked by a transport coupling.

Both serve requests with no lookahead, pay the hit in the pre-move state,
and only ever occupy states of the restricted space, so any run is feasible
for the restricted offline optimum and its cost dominates that optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .oracle import (
    StateSpace,
    Trajectory,
    TrajectoryRecord,
    default_initial_cuts,
    distance_matrix,
    enumerate_states,
    membership_matrix,
    minplus_distance,
)

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a listed dependency
    _njit = None
from .rebalance import global_rebalance
from .ring import CutEdgeSet, Rational

SOLVER_NAMES = ("wfa", "mw")


@dataclass(frozen=True)
class MtsInstance:
    """A restricted-state metrical task system: states, pairwise edit
    distances, and the initial (rebalanced) state."""

    space: StateSpace
    distance: np.ndarray
    membership: np.ndarray
    initial_index: int


def build_instance(
    n: int, k: int, alpha: Rational, initial: Optional[CutEdgeSet] = None
) -> MtsInstance:
    if initial is None:
        initial = default_initial_cuts(n)
    start, _ = global_rebalance(initial, k)
    space = enumerate_states(n, 2 * k, Fraction(alpha))
    return MtsInstance(
        space=space,
        distance=distance_matrix(space),
        membership=membership_matrix(space),
        initial_index=space.index_of(start),
    )


def hit_vector(space: StateSpace, edge: int) -> np.ndarray:
    """Per-state hit cost of a request: 1 exactly for states containing the edge."""
    if not 0 <= edge < space.n:
        raise ValueError(f"edge {edge} out of range for n={space.n}")
    return membership_matrix(space)[:, edge].astype(np.int64)


class WfaSolver:
    """Deterministic work-function solver.

    Maintains per-state optimal offline costs (the work table) and moves to
    the state minimizing updated work plus movement, ties toward the
    lexicographically smallest state.
    """

    name = "wfa"

    def __init__(self, instance: MtsInstance, seed: int = 0):
        self.instance = instance
        self.current = instance.initial_index
        self.work = instance.distance[instance.initial_index].astype(np.int64)

    def step(self, edge: int) -> tuple[int, int, int]:
        """Serve one request; returns (next_state_index, hit, move_cost)."""
        inst = self.instance
        hit = int(inst.membership[self.current, edge])
        hit_vec = inst.membership[:, edge].astype(np.int64)
        self.work = minplus_distance(inst.space, self.work + hit_vec)
        nxt = int(np.argmin(self.work + inst.distance[self.current]))
        move = int(inst.distance[self.current, nxt])
        self.current = nxt
        return nxt, hit, move


def _sorted_pairs(distance: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Off-diagonal state pairs sorted by (distance, donor, receiver)."""
    i, j = np.nonzero(distance > 0)
    d = distance[i, j]
    order = np.lexsort((j, i, d))
    return d[order].astype(np.int64), i[order].astype(np.int64), j[order].astype(np.int64)


@lru_cache(maxsize=16)
def _space_pairs(space: StateSpace) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return _sorted_pairs(distance_matrix(space))


@lru_cache(maxsize=256)
def _edge_pairs(space: StateSpace, edge: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sorted pairs restricted to (hit state, non-hit state) for one edge.

    After a multiplicative update for this edge only hit states lose mass
    and only non-hit states gain, so the coupling never uses other pairs.
    """
    d, pi, pj = _space_pairs(space)
    hit = membership_matrix(space)[:, edge]
    keep = hit[pi] & ~hit[pj]
    return d[keep], pi[keep], pj[keep]


def _allocate(d, pi, pj, surplus, deficit, out_i, out_j, out_amt):
    remaining = surplus.sum()
    other = deficit.sum()
    if other < remaining:
        remaining = other
    cost = 0.0
    count = 0
    for p in range(d.shape[0]):
        if remaining <= 1e-15:
            break
        i = pi[p]
        j = pj[p]
        amount = surplus[i]
        if deficit[j] < amount:
            amount = deficit[j]
        if amount <= 0.0:
            continue
        surplus[i] -= amount
        deficit[j] -= amount
        remaining -= amount
        cost += amount * d[p]
        out_i[count] = i
        out_j[count] = j
        out_amt[count] = amount
        count += 1
    return count, cost


if _njit is not None:
    _allocate = _njit(cache=True, nogil=True)(_allocate)


def _coupling_arrays(
    p_old: np.ndarray,
    p_new: np.ndarray,
    pairs: tuple[np.ndarray, np.ndarray, np.ndarray],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, float]:
    surplus = np.maximum(p_old - p_new, 0.0)
    deficit = np.maximum(p_new - p_old, 0.0)
    # Each allocation exhausts a donor or a receiver, so the flow count is
    # bounded by the number of states with changed mass.
    cap = 2 * len(p_old) + 1
    out_i = np.empty(cap, dtype=np.int64)
    out_j = np.empty(cap, dtype=np.int64)
    out_amt = np.empty(cap, dtype=np.float64)
    count, cost = _allocate(*pairs, surplus, deficit, out_i, out_j, out_amt)
    return out_i[:count], out_j[:count], out_amt[:count], float(cost)


def greedy_coupling(
    p_old: np.ndarray, p_new: np.ndarray, distance: np.ndarray
) -> tuple[list[tuple[int, int, float]], float]:
    """Transport plan between two distributions on the same states.

    Moves mass between donor states (mass decreased) and receiver states
    (mass increased) greedily in order of increasing pairwise distance,
    ties in (donor index, receiver index) order.  Returns the list of flows
    and the total transport cost.
    """
    fi, fj, amt, cost = _coupling_arrays(p_old, p_new, _sorted_pairs(distance))
    flows = [(int(a), int(b), float(x)) for a, b, x in zip(fi, fj, amt)]
    return flows, cost


def min_cost_coupling_value(
    p_old: np.ndarray, p_new: np.ndarray, distance: np.ndarray
) -> float:
    """Exact minimum transport cost (verification mode, small state counts)."""
    from scipy.optimize import linprog

    m = len(p_old)
    cost = distance.astype(float).ravel()
    a_eq = np.zeros((2 * m, m * m))
    for i in range(m):
        a_eq[i, i * m : (i + 1) * m] = 1.0
        a_eq[m + i, i::m] = 1.0
    b_eq = np.concatenate([p_old, p_new])
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if not res.success:
        raise RuntimeError(f"transport LP failed: {res.message}")
    return float(res.fun)


class MwSolver:
    """Randomized multiplicative-weights solver.

    Keeps a distribution over states, downweights hit states by
    ``exp(-eta)``, and resamples its occupied state through the greedy
    transport coupling so that the expected movement of the sampled path
    equals the coupling cost.  Fully determined by the seed.
    """

    name = "mw"

    def __init__(self, instance: MtsInstance, seed: int, eta: float = 0.1):
        if eta <= 0:
            raise ValueError(f"learning rate must be positive, got {eta}")
        self.instance = instance
        self.eta = eta
        self.rng = np.random.default_rng(seed)
        m = len(instance.space)
        self.dist = np.full(m, 1.0 / m)
        self.current = instance.initial_index
        self.expected_move_cost = 0.0

    def step(self, edge: int) -> tuple[int, int, int]:
        inst = self.instance
        hit = int(inst.membership[self.current, edge])
        hit_vec = inst.membership[:, edge].astype(float)
        new_dist = self.dist * np.exp(-self.eta * hit_vec)
        new_dist /= new_dist.sum()

        fi, fj, amt, cost = _coupling_arrays(self.dist, new_dist, _edge_pairs(inst.space, edge))
        self.expected_move_cost += cost
        nxt = self._sample_transition(fi, fj, amt)
        move = int(inst.distance[self.current, nxt])
        self.dist = new_dist
        self.current = nxt
        return nxt, hit, move

    def _sample_transition(self, fi: np.ndarray, fj: np.ndarray, amt: np.ndarray) -> int:
        mass_here = float(self.dist[self.current])
        here = fi == self.current
        if mass_here <= 0.0 or not here.any():
            return self.current
        u = self.rng.random() * mass_here
        acc = np.cumsum(amt[here])
        hits = np.nonzero(u < acc)[0]
        if len(hits) == 0:
            return self.current
        return int(fj[here][hits[0]])


def default_eta(horizon: Optional[int]) -> float:
    return 1.0 / math.sqrt(horizon) if horizon else 0.1


def make_solver(name: str, instance: MtsInstance, seed: int, eta: Optional[float] = None):
    if name == "wfa":
        return WfaSolver(instance, seed)
    if name == "mw":
        return MwSolver(instance, seed, eta if eta is not None else 0.1)
    raise ValueError(f"unknown solver {name!r}; choose from {SOLVER_NAMES}")


def run_online(
    solver_name: str,
    n: int,
    k: int,
    alpha: Rational,
    requests: Sequence[int],
    seed: int = 0,
    eta: Optional[float] = None,
    instance: Optional[MtsInstance] = None,
) -> Trajectory:
    """Serve a request sequence online inside the restricted state space.

    Starts from the globally rebalanced initial state (its cost, common to
    the whole class, is excluded); every visited state has at most ``2k``
    cut-edges and is ``alpha``-balanced.
    """
    if instance is None:
        instance = build_instance(n, k, alpha)
    if eta is None and solver_name == "mw":
        eta = default_eta(len(requests))
    solver = make_solver(solver_name, instance, seed, eta)
    states = instance.space.states
    records = []
    for e in requests:
        before = states[solver.current]
        nxt, hit, move = solver.step(e)
        records.append(TrajectoryRecord(e, before, states[nxt], hit, move))
    return Trajectory(n, states[instance.initial_index], tuple(records))
