"""Offline shadow algorithm: mirrors an optimal trajectory step by step
while keeping at most ``2k`` cut-edges, all of them cut-edges of the
mirrored optimum.

Execution is organized in phases.  Within a phase each single-node
recoloring of the optimum is answered by one of the case rules below; when
the response leaves the shadow coloring no longer ``alpha``-balanced
(``alpha = 3/2 + 1/k``), the cut-edge set is rebuilt from the optimum's
current cut-edges by global rebalancing and the phase closes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .oracle import Trajectory, TrajectoryRecord, decompose_transition
from .rebalance import global_rebalance
from .ring import (
    Arc,
    CutEdgeSet,
    PhiSet,
    StepKind,
    flip_node,
    less_count,
    phi,
    state_distance,
)


class SubCase(enum.Enum):
    SHIFT_FOLLOW = "shift_follow"
    SHIFT_SKIP = "shift_skip"
    ADD_FOLLOW = "add_follow"
    ADD_SKIP = "add_skip"
    REMOVE_NEITHER = "remove_neither"
    REMOVE_BOTH_EQUAL = "remove_both_equal"
    REMOVE_BOTH_EXTRA = "remove_both_extra"
    REMOVE_ONE = "remove_one"


@dataclass(frozen=True)
class StepRecord:
    step_index: int
    request_index: int
    kind: StepKind
    sub_case: SubCase
    off_recolor_cost: int
    delta_phi: int


@dataclass(frozen=True)
class PhaseRecord:
    phase_index: int
    recolor_cost: int  # step recoloring within the phase, rebalance excluded
    delta_phi: int  # potential change within the phase, rebalance excluded
    rebalance_cost: int  # 0 for the (possibly unfinished) last phase
    completed: bool


@dataclass
class ShadowState:
    """Mutable state of one shadow run."""

    off_cuts: CutEdgeSet
    opt_cuts: CutEdgeSet
    k: int
    alpha: Fraction
    phi_value: int
    phase_index: int = 0
    hit_cost: int = 0
    recolor_cost: int = 0
    rebalance_recolor: int = 0
    violations: list = field(default_factory=list)

    def check_invariants(self, where: str) -> None:
        off, opt = set(self.off_cuts.edges), set(self.opt_cuts.edges)
        if not off <= opt:
            self.violations.append(f"{where}: off_cuts not a subset of opt_cuts")
        if len(off) != min(2 * self.k, len(opt)):
            self.violations.append(
                f"{where}: |off_cuts|={len(off)} != min(2k, |opt_cuts|={len(opt)})"
            )
        actual_phi = state_distance(self.opt_cuts, self.off_cuts)
        if self.phi_value != actual_phi:
            self.violations.append(f"{where}: tracked phi {self.phi_value} != {actual_phi}")


@dataclass(frozen=True)
class OffRunResult:
    trajectory: Trajectory
    steps: tuple[StepRecord, ...]
    phases: tuple[PhaseRecord, ...]
    request_phase: tuple[int, ...]  # phase index open while serving each request
    initial_rebalance_cost: int
    hit_cost: int
    recolor_cost: int  # step recolorings
    rebalance_cost: int  # mid-run rebalancings (initial one excluded)
    violations: tuple[str, ...]

    @property
    def total_cost(self) -> int:
        """Full cost including the initial rebalancing recolorings."""
        return (
            self.initial_rebalance_cost
            + self.hit_cost
            + self.recolor_cost
            + self.rebalance_cost
        )


def arc_choice(phi_set: PhiSet, anchor: Optional[int] = None) -> Arc:
    """Pick a constituent arc of a non-empty potential set.

    Without an anchor: the smallest arc, ties toward the lowest start edge.
    With an anchor edge: the unique constituent arc having it as endpoint.
    """
    if not phi_set.constituent_arcs:
        raise ValueError("empty potential set has no arcs")
    if anchor is None:
        return min(phi_set.constituent_arcs, key=lambda a: (len(a), a.start_edge))
    for arc in phi_set.constituent_arcs:
        if anchor in (arc.start_edge, arc.end_edge):
            return arc
    raise ValueError(f"no constituent arc has edge {anchor} as endpoint")


def apply_step(state: ShadowState, w: int, step_index: int, request_index: int) -> StepRecord:
    """Answer one single-node recoloring of the mirrored optimum."""
    n = state.opt_cuts.n
    off = set(state.off_cuts.edges)
    opt_before = state.opt_cuts
    phi_before = phi(opt_before, state.off_cuts)

    new_opt, flip = flip_node(opt_before, w)
    cost = 0

    if flip.kind is StepKind.SHIFT:
        (removed,), (added,) = flip.removed, flip.added
        if removed in off:
            off.discard(removed)
            off.add(added)
            cost = 1
            sub = SubCase.SHIFT_FOLLOW
        else:
            sub = SubCase.SHIFT_SKIP

    elif flip.kind is StepKind.ADD_PAIR:
        if len(off) <= 2 * (state.k - 1):
            off.update(flip.added)
            cost = 1
            sub = SubCase.ADD_FOLLOW
        else:
            sub = SubCase.ADD_SKIP

    else:  # REMOVE_PAIR
        c_i, c_j = flip.removed
        in_i, in_j = c_i in off, c_j in off
        if not in_i and not in_j:
            sub = SubCase.REMOVE_NEITHER
        elif in_i and in_j:
            if off == set(opt_before.edges):
                off -= {c_i, c_j}
                cost = 1
                sub = SubCase.REMOVE_BOTH_EQUAL
            else:
                off -= {c_i, c_j}
                arc = arc_choice(phi_before)
                off.update((arc.start_edge, arc.end_edge))
                cost = 1 + len(arc)
                sub = SubCase.REMOVE_BOTH_EXTRA
        else:
            # Exactly one removed edge was followed by the shadow; trade the
            # other for the far endpoint of the potential arc anchored at
            # the missing one.
            missing, kept = (c_i, c_j) if not in_i else (c_j, c_i)
            arc = arc_choice(phi_before, anchor=missing)
            far = arc.end_edge if arc.start_edge == missing else arc.start_edge
            recolored = set(arc.nodes) ^ {w}
            off.discard(kept)
            off.add(far)
            cost = len(recolored)
            sub = SubCase.REMOVE_ONE

    state.opt_cuts = new_opt
    state.off_cuts = CutEdgeSet.of(n, off)
    new_phi = state_distance(state.opt_cuts, state.off_cuts)
    delta_phi = new_phi - state.phi_value
    state.phi_value = new_phi
    state.recolor_cost += cost

    record = StepRecord(step_index, request_index, flip.kind, sub, cost, delta_phi)
    state.check_invariants(f"step {step_index}")
    return record


def run_off(n: int, k: int, requests: Sequence[int], opt_traj: Trajectory) -> OffRunResult:
    """Shadow a full optimal trajectory on ``requests``."""
    if opt_traj.n != n or len(opt_traj.records) != len(requests):
        raise ValueError("optimal trajectory inconsistent with the request sequence")
    alpha = Fraction(3, 2) + Fraction(1, k)
    alpha_cap = alpha * Fraction(n, 2)

    opt0 = opt_traj.initial
    off0, _ = global_rebalance(opt0, k)
    initial_rebalance_cost = state_distance(opt0, off0)
    state = ShadowState(
        off_cuts=off0,
        opt_cuts=opt0,
        k=k,
        alpha=alpha,
        phi_value=state_distance(opt0, off0),
    )
    state.check_invariants("initial rebalance")

    steps: list[StepRecord] = []
    phases: list[PhaseRecord] = []
    rows: list[TrajectoryRecord] = []
    request_phase: list[int] = []
    phase_recolor = 0
    phase_phi_start = state.phi_value
    step_index = 0

    for t, (e, rec) in enumerate(zip(requests, opt_traj.records)):
        if rec.request_edge != e:
            raise ValueError("optimal trajectory inconsistent with the request sequence")
        if rec.state_before_move != state.opt_cuts:
            raise ValueError(f"optimal trajectory discontinuous at request {t}")

        off_before = state.off_cuts
        request_phase.append(state.phase_index)
        hit = 1 if e in state.off_cuts else 0
        if hit and e not in state.opt_cuts:
            state.violations.append(f"request {t}: shadow hit without an optimum hit")
        state.hit_cost += hit

        recolor_before = state.recolor_cost
        for w in decompose_transition(rec.state_before_move, rec.state_after_move):
            steps.append(apply_step(state, w, step_index, t))
            step_index += 1
        if state.opt_cuts != rec.state_after_move:
            raise ValueError(f"step decomposition did not reach the optimum state at {t}")
        request_recolor = state.recolor_cost - recolor_before
        phase_recolor += request_recolor

        rebalance_cost = 0
        if n - less_count(state.off_cuts) > alpha_cap:
            new_off, _ = global_rebalance(state.opt_cuts, k)
            rebalance_cost = state_distance(state.off_cuts, new_off)
            phases.append(
                PhaseRecord(
                    state.phase_index,
                    phase_recolor,
                    state.phi_value - phase_phi_start,
                    rebalance_cost,
                    completed=True,
                )
            )
            state.off_cuts = new_off
            state.rebalance_recolor += rebalance_cost
            state.phi_value = state_distance(state.opt_cuts, state.off_cuts)
            state.phase_index += 1
            phase_recolor = 0
            phase_phi_start = state.phi_value
            state.check_invariants(f"rebalance after request {t}")

        rows.append(
            TrajectoryRecord(e, off_before, state.off_cuts, hit, request_recolor + rebalance_cost)
        )

    phases.append(
        PhaseRecord(
            state.phase_index,
            phase_recolor,
            state.phi_value - phase_phi_start,
            0,
            completed=False,
        )
    )

    return OffRunResult(
        trajectory=Trajectory(n, off0, tuple(rows)),
        steps=tuple(steps),
        phases=tuple(phases),
        request_phase=tuple(request_phase),
        initial_rebalance_cost=initial_rebalance_cost,
        hit_cost=state.hit_cost,
        recolor_cost=state.recolor_cost,
        rebalance_cost=state.rebalance_recolor,
        violations=tuple(state.violations),
    )
