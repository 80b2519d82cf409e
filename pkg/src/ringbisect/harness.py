"""Experiment harness: request generators, the experiment runner with CSV /
JSONL trace emission, and the invariant verifier."""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import online, oracle, rebalance, ring, shadow

ALGORITHMS = ("exact_opt", "restricted_opt", "off_shadow", "wfa", "mw")
GENERATORS = ("uniform", "sweep", "blocks", "cut-chaser")

TRACE_COLUMNS = (
    "t",
    "request_edge",
    "algorithm",
    "hit",
    "recolor",
    "cumulative_cost",
    "cut_count",
    "less_count",
    "phase_index",
)


@dataclass(frozen=True)
class RunConfig:
    n: int
    k: int
    alpha: Optional[Fraction] = None  # defaults to 3/2 + 1/k
    seed: int = 0
    gen: str = "uniform"
    length: int = 50
    algos: tuple[str, ...] = ALGORITHMS
    out_dir: Optional[Path] = None
    fmt: str = "csv"
    eta: Optional[float] = None

    def resolved_alpha(self) -> Fraction:
        return self.alpha if self.alpha is not None else Fraction(3, 2) + Fraction(1, self.k)

    def validate(self) -> None:
        ring.check_ring_size(self.n)
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        alpha = self.resolved_alpha()
        if alpha < 1 + Fraction(1, self.k):
            raise ValueError(f"alpha={alpha} below class requirement 1 + 1/k")
        if self.length < 0:
            raise ValueError("sequence length must be >= 0")
        for a in self.algos:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        if self.fmt not in ("csv", "jsonl"):
            raise ValueError(f"unknown format {self.fmt!r}")


def generate(
    gen_spec: str,
    n: int,
    length: int,
    seed: int,
    k: int = 1,
    alpha: Optional[Fraction] = None,
) -> tuple[int, ...]:
    """Build a request sequence of ring-edge indices.

    Specs: ``uniform`` (i.i.d.), ``sweep`` (cyclic 0,1,2,...), ``blocks[:L]``
    (a random edge repeated L times, redrawn), ``cut-chaser`` (frozen
    oblivious adversary that chases the deterministic work-function run).
    """
    ring.check_ring_size(n)
    name, _, arg = gen_spec.partition(":")
    rng = np.random.default_rng(seed)

    if name == "uniform":
        return tuple(int(e) for e in rng.integers(0, n, size=length))
    if name == "sweep":
        return tuple(t % n for t in range(length))
    if name == "blocks":
        block = int(arg) if arg else 8
        if block < 1:
            raise ValueError(f"block length must be >= 1, got {block}")
        out: list[int] = []
        while len(out) < length:
            out.extend([int(rng.integers(0, n))] * block)
        return tuple(out[:length])
    if name == "cut-chaser":
        return _cut_chaser(n, length, k, alpha)
    raise ValueError(f"unknown generator {gen_spec!r}; choose from {GENERATORS}")


def _cut_chaser(n: int, length: int, k: int, alpha: Optional[Fraction]) -> tuple[int, ...]:
    """Precompute a sequence by always requesting a current cut-edge of the
    deterministic work-function solver; frozen before any randomized run,
    hence oblivious."""
    if alpha is None:
        alpha = Fraction(3, 2) + Fraction(1, k)
    instance = online.build_instance(n, k, alpha)
    solver = online.WfaSolver(instance)
    out = []
    for _ in range(length):
        cuts = instance.space.states[solver.current].edges
        e = cuts[0] if cuts else 0
        out.append(e)
        solver.step(e)
    return tuple(out)


@dataclass
class AlgoResult:
    name: str
    trajectory: oracle.Trajectory
    total: int
    hit: int
    recolor: int
    phase_indices: tuple[int, ...]  # per request; zeros for phase-free algorithms
    phase_count: int = 1
    bound_flags: dict = field(default_factory=dict)
    violations: tuple[str, ...] = ()


def _trace_rows(result: AlgoResult) -> list[dict]:
    rows = []
    cum = 0
    for t, rec in enumerate(result.trajectory.records):
        cum += rec.hit + rec.recolor
        state = rec.state_after_move
        rows.append(
            {
                "t": t,
                "request_edge": rec.request_edge,
                "algorithm": result.name,
                "hit": rec.hit,
                "recolor": rec.recolor,
                "cumulative_cost": cum,
                "cut_count": len(state),
                "less_count": ring.less_count(state),
                "phase_index": result.phase_indices[t],
            }
        )
    return rows


def run_experiment(cfg: RunConfig) -> dict:
    """Run the configured algorithms on one request sequence.

    Returns the JSON summary (totals, ratios, bound flags); writes traces
    and the summary under ``cfg.out_dir`` when set.
    """
    cfg.validate()
    alpha = cfg.resolved_alpha()
    requests = generate(cfg.gen, cfg.n, cfg.length, cfg.seed, cfg.k, alpha)
    initial = oracle.default_initial_cuts(cfg.n)
    results: list[AlgoResult] = []
    zeros = (0,) * len(requests)

    opt_total = None
    opt_traj = None
    if "exact_opt" in cfg.algos or "off_shadow" in cfg.algos:
        space = oracle.enumerate_states(cfg.n, None, Fraction(1))
        opt_total, opt_traj = oracle.exact_opt(space, initial, requests)
        if "exact_opt" in cfg.algos:
            results.append(
                AlgoResult(
                    "exact_opt", opt_traj, opt_total, opt_traj.hit_cost,
                    opt_traj.recolor_cost, zeros,
                )
            )

    restricted_total = None
    if "restricted_opt" in cfg.algos:
        restricted_total, traj = oracle.restricted_opt(cfg.n, cfg.k, alpha, requests, initial)
        results.append(
            AlgoResult(
                "restricted_opt", traj, restricted_total, traj.hit_cost,
                traj.recolor_cost, zeros,
            )
        )

    off_total = None
    if "off_shadow" in cfg.algos:
        off = shadow.run_off(cfg.n, cfg.k, requests, opt_traj)
        step_ok = all(s.off_recolor_cost + s.delta_phi <= 1 for s in off.steps)
        phase_ok = all(
            2 * cfg.k * (p.recolor_cost + p.delta_phi) >= cfg.n
            for p in off.phases
            if p.completed
        )
        theorem_ok = None
        if opt_total is not None:
            theorem_ok = 2 * off.total_cost <= 2 * (3 * cfg.k + 1) * opt_total + 3 * cfg.n
        off_total = off.total_cost
        phase_indices = off.request_phase
        results.append(
            AlgoResult(
                "off_shadow", off.trajectory, off.total_cost, off.hit_cost,
                off.recolor_cost + off.rebalance_cost + off.initial_rebalance_cost,
                phase_indices,
                phase_count=len(off.phases),
                bound_flags={
                    "per_step_bound_ok": step_ok,
                    "phase_bound_ok": phase_ok,
                    "hit_dominance_ok": off.hit_cost <= opt_traj.hit_cost,
                    "offline_ratio_bound_ok": theorem_ok,
                },
                violations=off.violations,
            )
        )

    online_names = [a for a in cfg.algos if a in ("wfa", "mw")]
    if online_names:
        instance = online.build_instance(cfg.n, cfg.k, alpha, initial)
        for name in online_names:
            traj = online.run_online(
                name, cfg.n, cfg.k, alpha, requests,
                seed=cfg.seed, eta=cfg.eta, instance=instance,
            )
            in_space = all(
                len(r.state_after_move) <= 2 * cfg.k
                and ring.is_alpha_balanced(r.state_after_move, alpha)
                for r in traj.records
            )
            results.append(
                AlgoResult(
                    name, traj, traj.total_cost, traj.hit_cost, traj.recolor_cost,
                    zeros, bound_flags={"in_restricted_space": in_space},
                )
            )

    summary = _summarize(cfg, alpha, requests, results, opt_total, restricted_total, off_total)
    if cfg.out_dir is not None:
        _write_outputs(cfg, results, summary)
    return summary


def _summarize(cfg, alpha, requests, results, opt_total, restricted_total, off_total):
    totals = {
        r.name: {
            "total": r.total,
            "hit": r.hit,
            "recolor": r.recolor,
            "phase_count": r.phase_count,
            **{k: v for k, v in r.bound_flags.items()},
        }
        for r in results
    }
    ratios = {}
    if opt_total and off_total is not None:
        ratios["off_over_opt"] = round(off_total / opt_total, 6)
    for r in results:
        if r.name in ("wfa", "mw"):
            if off_total:
                ratios[f"{r.name}_over_off"] = round(r.total / off_total, 6)
            if opt_total:
                ratios[f"{r.name}_over_opt"] = round(r.total / opt_total, 6)
            if restricted_total:
                ratios[f"{r.name}_over_restricted_opt"] = round(r.total / restricted_total, 6)
    all_ok = all(
        flag in (True, None) for r in results for flag in r.bound_flags.values()
    ) and not any(r.violations for r in results)
    flagged = alpha >= 2
    return {
        "config": {
            "n": cfg.n,
            "k": cfg.k,
            "alpha": str(alpha),
            "seed": cfg.seed,
            "gen": cfg.gen,
            "length": cfg.length,
            "algorithms": list(r.name for r in results),
        },
        "alpha_trivial_augmentation": bool(flagged),
        "requests_head": list(requests[:16]),
        "totals": totals,
        "ratios": ratios,
        "invariants_ok": bool(all_ok),
        "violations": [v for r in results for v in r.violations],
    }


def render_trace(results: Sequence[AlgoResult], fmt: str) -> str:
    rows = [row for r in results for row in _trace_rows(r)]
    if fmt == "jsonl":
        return "".join(json.dumps(row, sort_keys=False) + "\n" for row in rows)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=TRACE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _write_outputs(cfg: RunConfig, results: list[AlgoResult], summary: dict) -> None:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = "csv" if cfg.fmt == "csv" else "jsonl"
    (out / f"trace.{ext}").write_text(render_trace(results, cfg.fmt))
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=False) + "\n")


# ---------------------------------------------------------------------------
# Invariant verifier


@dataclass
class SuiteResult:
    name: str
    passed: bool
    cases: int
    counterexample: Optional[str] = None
    seconds: float = 0.0


def _random_balanced_cuts(n: int, rng: np.random.Generator) -> ring.CutEdgeSet:
    colors = [ring.Color.RED] * (n // 2) + [ring.Color.BLUE] * (n // 2)
    rng.shuffle(colors)
    return ring.cut_edges_of(colors)


def _suite_phi_bruteforce(rng: np.random.Generator, sizes=(4, 6, 8), samples=400):
    cases = 0
    for n in sizes:
        all_states = oracle.enumerate_states(n, None, Fraction(10)).states
        pairs = (
            [(a, b) for a in all_states for b in all_states]
            if len(all_states) <= 40
            else [
                (all_states[rng.integers(len(all_states))], all_states[rng.integers(len(all_states))])
                for _ in range(samples)
            ]
        )
        for a, b in pairs:
            cases += 1
            expected = brute_force_distance(a, b)
            got = ring.state_distance(a, b)
            if got != expected:
                return False, cases, f"n={n} {a.edges} vs {b.edges}: phi={got}, brute={expected}"
    return True, cases, None


def brute_force_distance(a: ring.CutEdgeSet, b: ring.CutEdgeSet) -> int:
    ca = ring.coloring_of(a)
    cb = ring.coloring_of(b)
    differ = sum(1 for x, y in zip(ca, cb) if x != y)
    return min(differ, a.n - differ)


def _suite_metric_axioms(rng, sizes=(4, 6, 8), samples=0):
    cases = 0
    for n in sizes:
        space = oracle.enumerate_states(n, None, Fraction(10))
        d = oracle.distance_matrix(space)
        cases += d.size
        if not np.array_equal(d, d.T):
            return False, cases, f"n={n}: distance not symmetric"
        if np.any(np.diag(d) != 0) or np.any((d == 0) & ~np.eye(len(d), dtype=bool)):
            return False, cases, f"n={n}: zero-distance axiom violated"
        viol = d[:, :, None] > d[:, None, :] + d[None, :, :]
        if np.any(viol):
            x, y, z = map(int, np.argwhere(viol)[0])
            return False, cases, f"n={n}: triangle violated at states {x},{z},{y}"
    return True, cases, None


def _suite_rebalance(rng, sizes=range(4, 33, 2), samples=200):
    cases = 0
    for n in sizes:
        for _ in range(samples):
            cuts = _random_balanced_cuts(n, rng)
            for k in range(1, 7):
                cases += 1
                err = check_rebalance_postconditions(cuts, k)
                if err:
                    return False, cases, f"n={n} k={k} C={cuts.edges}: {err}"
    return True, cases, None


def check_rebalance_postconditions(cuts: ring.CutEdgeSet, k: int) -> Optional[str]:
    n = cuts.n
    result, trace = rebalance.global_rebalance(cuts, k)
    if not set(result.edges) <= set(cuts.edges):
        return "result not a subset"
    if len(result) != min(2 * k, len(cuts)):
        return f"size {len(result)} != min(2k, |C|)"
    if 2 * k * ring.less_count(result) < k * n - n:
        return f"not (1+1/k)-balanced: less={ring.less_count(result)}"
    edges_left = len(cuts)
    for step in trace.steps:
        j_before = edges_left // 2
        # arc_size <= n/(2j) + n/(2j^2), cleared of denominators
        if 2 * j_before * j_before * step.arc_size > n * j_before + n:
            return f"removed arc larger than proof bound at j={j_before}"
        edges_left -= 2
        j = edges_left // 2
        if 2 * j * step.less_after < j * n - n:
            return f"trace invariant violated at j={j}"
    return None


def _suite_oracle(rng, sizes=(4, 6), samples=50):
    cases = 0
    for n in sizes:
        space = oracle.enumerate_states(n, None, Fraction(1))
        for _ in range(samples):
            cases += 1
            horizon = int(rng.integers(1, 5))
            requests = tuple(int(e) for e in rng.integers(0, n, size=horizon))
            initial = space.states[int(rng.integers(len(space)))]
            got, traj = oracle.exact_opt(space, initial, requests)
            expected = exhaustive_opt(space, initial, requests)
            if got != expected:
                return False, cases, f"n={n} σ={requests}: dp={got}, exhaustive={expected}"
    return True, cases, None


def exhaustive_opt(space, initial, requests) -> int:
    import itertools as it

    d = oracle.distance_matrix(space)
    member = oracle.membership_matrix(space)
    start = space.index_of(initial)
    best = None
    for seq in it.product(range(len(space)), repeat=len(requests)):
        cost = 0
        cur = start
        for e, nxt in zip(requests, seq):
            cost += int(member[cur, e]) + int(d[cur, nxt])
            cur = nxt
        best = cost if best is None else min(best, cost)
    return best


def _suite_off_shadow(rng, sizes=(8, 10), samples=6):
    cases = 0
    for n in sizes:
        space = oracle.enumerate_states(n, None, Fraction(1))
        for k in (1, 2):
            for _ in range(samples):
                cases += 1
                requests = tuple(int(e) for e in rng.integers(0, n, size=60))
                opt_total, opt_traj = oracle.exact_opt(
                    space, oracle.default_initial_cuts(n), requests
                )
                off = shadow.run_off(n, k, requests, opt_traj)
                err = check_off_invariants(n, k, off, opt_traj, opt_total)
                if err:
                    return False, cases, f"n={n} k={k}: {err}"
    return True, cases, None


def check_off_invariants(n, k, off, opt_traj, opt_total) -> Optional[str]:
    if off.violations:
        return off.violations[0]
    for s in off.steps:
        if s.off_recolor_cost + s.delta_phi > 1:
            return f"per-step bound violated at step {s.step_index}"
    for rec_off, rec_opt in zip(off.trajectory.records, opt_traj.records):
        off_state, opt_state = rec_off.state_after_move, rec_opt.state_after_move
        if ring.less_count(off_state) + ring.state_distance(opt_state, off_state) < n // 2:
            return "boundary lower bound less+phi >= n/2 violated"
    for p in off.phases:
        if p.completed and 2 * k * (p.recolor_cost + p.delta_phi) < n:
            return f"phase bound violated in phase {p.phase_index}"
    if off.hit_cost > opt_traj.hit_cost:
        return "hit cost exceeds the optimum's"
    if 2 * off.total_cost > 2 * (3 * k + 1) * opt_total + 3 * n:
        return "offline cost bound with explicit constants violated"
    return None


def _suite_online(rng, sizes=(8,), samples=3):
    cases = 0
    for n in sizes:
        for k in (1, 2):
            alpha = Fraction(3, 2) + Fraction(1, k)
            instance = online.build_instance(n, k, alpha)
            for _ in range(samples):
                cases += 1
                requests = tuple(int(e) for e in rng.integers(0, n, size=60))
                ropt, _ = oracle.restricted_opt(n, k, alpha, requests)
                for name in online.SOLVER_NAMES:
                    traj = online.run_online(
                        name, n, k, alpha, requests, seed=7, instance=instance
                    )
                    if traj.total_cost < ropt:
                        return False, cases, f"{name} n={n} k={k}: cost below restricted optimum"
                    for rec in traj.records:
                        if len(rec.state_after_move) > 2 * k or not ring.is_alpha_balanced(
                            rec.state_after_move, alpha
                        ):
                            return False, cases, f"{name}: left the restricted space"
    return True, cases, None


SUITES: dict[str, Callable] = {
    "phi": _suite_phi_bruteforce,
    "metric": _suite_metric_axioms,
    "rebalance": _suite_rebalance,
    "oracle": _suite_oracle,
    "off": _suite_off_shadow,
    "online": _suite_online,
}


def verify(scopes: Optional[Sequence[str]] = None, seed: int = 0) -> list[SuiteResult]:
    """Run the property suites; failures carry a counterexample dump."""
    names = list(scopes) if scopes else list(SUITES)
    results = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        rng = np.random.default_rng(seed)
        started = time.perf_counter()
        passed, cases, counterexample = SUITES[name](rng)
        results.append(
            SuiteResult(name, passed, cases, counterexample, time.perf_counter() - started)
        )
    return results
