"""Simulation and verification lab for online bisection with ring demands."""

from .oracle import (
    Trajectory,
    decompose_transition,
    default_initial_cuts,
    enumerate_states,
    exact_opt,
    restricted_opt,
)
from .rebalance import global_rebalance
from .ring import (
    Arc,
    Color,
    CutEdgeSet,
    PhiSet,
    StepKind,
    arc_between,
    arc_distance,
    coloring_of,
    cut_edges_of,
    flip_node,
    is_alpha_balanced,
    less_count,
    phi,
    state_distance,
)
from .shadow import run_off
from .online import run_online

__all__ = [
    "Arc",
    "Color",
    "CutEdgeSet",
    "PhiSet",
    "StepKind",
    "Trajectory",
    "arc_between",
    "arc_distance",
    "coloring_of",
    "cut_edges_of",
    "decompose_transition",
    "default_initial_cuts",
    "enumerate_states",
    "exact_opt",
    "flip_node",
    "global_rebalance",
    "is_alpha_balanced",
    "less_count",
    "phi",
    "restricted_opt",
    "run_off",
    "run_online",
    "state_distance",
]
