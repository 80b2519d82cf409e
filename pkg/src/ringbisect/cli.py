"""Command-line interface: state-space inspection, oracle runs, experiments,
invariant verification, and timing."""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import harness, oracle


def _add_common(parser: argparse.ArgumentParser, with_seq: bool = True) -> None:
    parser.add_argument("--n", type=int, default=8, help="ring size (even, >= 4)")
    parser.add_argument("--k", type=int, default=2, help="cut-edge budget parameter")
    parser.add_argument(
        "--alpha", type=Fraction, default=None,
        help="balance parameter as a fraction, e.g. 2 or 7/4 (default 3/2 + 1/k)",
    )
    if with_seq:
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--gen", default="uniform", help="uniform|sweep|blocks[:L]|cut-chaser")
        parser.add_argument("--len", dest="length", type=int, default=50)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringbisect",
        description="Simulation and verification lab for online ring bisection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_states = sub.add_parser("states", help="enumerate/count restricted state spaces")
    _add_common(p_states, with_seq=False)
    p_states.add_argument("--list", action="store_true", help="print every state")

    p_opt = sub.add_parser("opt", help="exact or restricted offline optimum")
    _add_common(p_opt)
    p_opt.add_argument(
        "--restricted", action="store_true",
        help="optimize within the (2k, alpha)-restricted class instead of the full optimum",
    )

    p_run = sub.add_parser("run", help="run an experiment across algorithms")
    _add_common(p_run)
    p_run.add_argument("--algo", action="append", choices=harness.ALGORITHMS,
                       help="repeatable; default: all algorithms")
    p_run.add_argument("--out", type=Path, default=None, help="output directory for traces")
    p_run.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    p_run.add_argument("--eta", type=float, default=None, help="mw learning rate")

    p_verify = sub.add_parser("verify", help="run the invariant suites")
    p_verify.add_argument("--suite", action="append", choices=sorted(harness.SUITES),
                          help="repeatable; default: all suites")
    p_verify.add_argument("--seed", type=int, default=0)

    p_bench = sub.add_parser("bench", help="time the oracle and solvers on one config")
    _add_common(p_bench)

    return parser


def cmd_states(args) -> int:
    alpha = args.alpha if args.alpha is not None else Fraction(3, 2) + Fraction(1, args.k)
    space = oracle.enumerate_states(args.n, 2 * args.k, alpha)
    print(f"n={args.n} max_cut={2 * args.k} alpha={alpha}: {len(space)} states")
    if args.list:
        for s in space.states:
            print(" ", s.edges)
    return 0


def cmd_opt(args) -> int:
    alpha = args.alpha if args.alpha is not None else Fraction(3, 2) + Fraction(1, args.k)
    requests = harness.generate(args.gen, args.n, args.length, args.seed, args.k, alpha)
    if args.restricted:
        total, traj = oracle.restricted_opt(args.n, args.k, alpha, requests)
        label = f"restricted optimum (2k={2 * args.k}, alpha={alpha})"
    else:
        space = oracle.enumerate_states(args.n, None, Fraction(1))
        total, traj = oracle.exact_opt(space, oracle.default_initial_cuts(args.n), requests)
        label = "exact optimum"
    print(f"{label}: total={total} hit={traj.hit_cost} recolor={traj.recolor_cost}")
    return 0


def cmd_run(args) -> int:
    cfg = harness.RunConfig(
        n=args.n,
        k=args.k,
        alpha=args.alpha,
        seed=args.seed,
        gen=args.gen,
        length=args.length,
        algos=tuple(args.algo) if args.algo else harness.ALGORITHMS,
        out_dir=args.out,
        fmt=args.format,
        eta=args.eta,
    )
    summary = harness.run_experiment(cfg)
    print(json.dumps(summary, indent=2))
    return 0 if summary["invariants_ok"] else 1


def cmd_verify(args) -> int:
    results = harness.verify(args.suite, seed=args.seed)
    failed = False
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: {r.cases} cases in {r.seconds:.2f}s")
        if not r.passed:
            failed = True
            print(f"  counterexample: {r.counterexample}")
    return 1 if failed else 0


def cmd_bench(args) -> int:
    alpha = args.alpha if args.alpha is not None else Fraction(3, 2) + Fraction(1, args.k)
    requests = harness.generate(args.gen, args.n, args.length, args.seed, args.k, alpha)
    timings = {}

    start = time.perf_counter()
    space = oracle.enumerate_states(args.n, None, Fraction(1))
    opt_total, opt_traj = oracle.exact_opt(space, oracle.default_initial_cuts(args.n), requests)
    timings["exact_opt"] = time.perf_counter() - start

    from . import online as online_mod, shadow as shadow_mod

    start = time.perf_counter()
    shadow_mod.run_off(args.n, args.k, requests, opt_traj)
    timings["off_shadow"] = time.perf_counter() - start

    instance = online_mod.build_instance(args.n, args.k, alpha)
    for name in online_mod.SOLVER_NAMES:
        start = time.perf_counter()
        online_mod.run_online(name, args.n, args.k, alpha, requests,
                              seed=args.seed, instance=instance)
        timings[name] = time.perf_counter() - start

    for name, seconds in timings.items():
        print(f"{name}: {seconds * 1000:.1f} ms for T={args.length}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "states": cmd_states,
        "opt": cmd_opt,
        "run": cmd_run,
        "verify": cmd_verify,
        "bench": cmd_bench,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
