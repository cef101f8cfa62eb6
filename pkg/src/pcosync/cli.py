"""Command line front end.

Exit codes: 0 on success, 2 on validation failure (including unreadable or
malformed inputs), 3 when a run aborts on a protocol fault or a broken
runtime invariant.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    GraphTooLargeError,
    InvariantViolation,
    ProtocolFault,
    ScenarioValidationError,
)
from .graph import MAX_EXHAUSTIVE_NODES, is_r_robust, load_graph, max_robustness
from .runner import RunResult, run_scenario
from .scenario import load_scenario
from .sweep import SweepSpec, sweep_frontier, frontier_header, write_frontier

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3


def _fail_validation(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_VALIDATION


def _load(path: str):
    try:
        return load_scenario(path)
    except FileNotFoundError:
        raise ScenarioValidationError([f"scenario file not found: {path}"])
    except json.JSONDecodeError as exc:
        raise ScenarioValidationError([f"scenario file is not valid JSON: {exc}"])


def _apply_overrides(config, args) -> None:
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "horizon", None) is not None:
        config.horizon = args.horizon
    if getattr(args, "algorithm", None) is not None:
        config.algorithm = args.algorithm


def _summary_lines(result: RunResult) -> list[str]:
    config = result.config
    metrics = result.metrics
    lines = [
        f"scenario: {config.name or '(unnamed)'}",
        f"algorithm: {config.algorithm}",
        f"nodes: {config.graph.node_count}",
        f"normal: {len(config.normal_ids)}",
        f"attackers: {sorted(config.faulty_ids)}",
        f"f: {config.f}",
        f"seed: {config.seed}",
        f"horizon: {config.horizon!r}",
        f"outcome: {result.outcome}",
        f"events: {result.world.event_count}",
        f"final_time: {result.world.clock!r}",
        f"final_arc: {metrics.last.delta!r}",
        f"final_frequency_spread: {metrics.last.delta_windowed!r}",
        f"detections: {[(k, t, node) for k, t, node in metrics.detection_events]}",
        f"monitor_violations: {len(metrics.violations) + metrics.suppressed_violations()}",
    ]
    if result.fault_message:
        lines.append(f"fault: {result.fault_message}")
    return lines


def _cmd_validate_config(args) -> int:
    try:
        config = _load(args.scenario)
        violations, info = config.validate()
    except ScenarioValidationError as exc:
        for line in exc.violations:
            print(f"violation: {line}")
        return EXIT_VALIDATION
    for line in info:
        print(f"info: {line}")
    for line in violations:
        print(f"violation: {line}")
    if violations:
        print(f"invalid: {len(violations)} violation(s)")
        return EXIT_VALIDATION
    print("valid")
    return EXIT_OK


def _cmd_check_robustness(args) -> int:
    try:
        graph = load_graph(args.graph)
    except (FileNotFoundError, ValueError) as exc:
        return _fail_validation(str(exc))
    try:
        if args.r is not None:
            robust = is_r_robust(graph, args.r, max_nodes=args.max_nodes)
            print(f"nodes: {graph.node_count}")
            print(f"r: {args.r}")
            print(f"robust: {'yes' if robust else 'no'}")
            return EXIT_OK if robust else EXIT_VALIDATION
        r = max_robustness(graph, max_nodes=args.max_nodes)
        print(f"nodes: {graph.node_count}")
        print(f"max_robustness: {r}")
        return EXIT_OK
    except GraphTooLargeError as exc:
        return _fail_validation(str(exc))


def _cmd_run(args) -> int:
    try:
        config = _load(args.scenario)
    except ScenarioValidationError as exc:
        for line in exc.violations:
            print(f"violation: {line}", file=sys.stderr)
        return EXIT_VALIDATION
    _apply_overrides(config, args)
    try:
        result = run_scenario(
            config,
            force=args.force,
            trace_path=args.trace,
        )
    except ScenarioValidationError as exc:
        for line in exc.violations:
            print(f"violation: {line}", file=sys.stderr)
        print("invalid: rerun with --force to execute anyway", file=sys.stderr)
        return EXIT_VALIDATION
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    lines = _summary_lines(result)
    if args.trace:
        lines.append(f"trace: {args.trace}")
    text = "\n".join(lines) + "\n"
    if args.summary and args.summary != "-":
        Path(args.summary).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_RUNTIME if result.outcome == "fault" else EXIT_OK


def _cmd_sweep(args) -> int:
    try:
        config = _load(args.scenario)
    except ScenarioValidationError as exc:
        for line in exc.violations:
            print(f"violation: {line}", file=sys.stderr)
        return EXIT_VALIDATION
    _apply_overrides(config, args)
    try:
        grid = tuple(float(x) for x in args.grid.split(","))
        spec = SweepSpec(
            base=config,
            arc_grid=grid,
            trials=args.trials,
            spread_cap=args.spread_cap,
            bisect_tol=args.tol,
            seed=args.seed if args.seed is not None else config.seed,
            success_threshold=args.threshold,
            synchronized_only=args.synchronized_only,
        )
    except ValueError as exc:
        return _fail_validation(str(exc))

    def progress(point):
        print(
            f"# arc {point.arc0:g}: spread {point.spread0_max:.4f} "
            f"(rate {point.success_rate:.2f})",
            file=sys.stderr,
        )

    try:
        points = sweep_frontier(spec, parallelism=args.parallelism, progress=progress)
    except (InvariantViolation, ProtocolFault) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    if args.output:
        write_frontier(args.output, points)
    else:
        print(frontier_header())
        for p in points:
            print(f"{p.arc0!r},{p.spread0_max!r},{p.success_rate!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcosync",
        description="Resilient pulse-coupled oscillator synchronization simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser(
        "validate-config", help="check a scenario file and report violations"
    )
    p_val.add_argument("scenario", help="path to a scenario JSON file")
    p_val.set_defaults(func=_cmd_validate_config)

    p_rob = sub.add_parser(
        "check-robustness", help="exhaustively check graph robustness"
    )
    p_rob.add_argument("graph", help="path to a graph text file")
    p_rob.add_argument("--r", type=int, default=None, help="robustness level to test; omit to scan for the maximum")
    p_rob.add_argument(
        "--max-nodes",
        type=int,
        default=MAX_EXHAUSTIVE_NODES,
        help="node-count guard for the exhaustive enumeration",
    )
    p_rob.set_defaults(func=_cmd_check_robustness)

    p_run = sub.add_parser("run", help="execute one scenario")
    p_run.add_argument("scenario", help="path to a scenario JSON file")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--horizon", type=float, default=None, help="override the time horizon")
    p_run.add_argument("--algorithm", choices=("absolute", "relative"), default=None)
    p_run.add_argument("--trace", default=None, help="write the per-event trace CSV here")
    p_run.add_argument(
        "--summary", default=None,
        help="write the summary to this file ('-' or omitted: stdout)",
    )
    p_run.add_argument("--force", action="store_true", help="run despite validation violations")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="estimate the admissible-spread frontier")
    p_sweep.add_argument("scenario", help="base scenario JSON file (initial conditions ignored)")
    p_sweep.add_argument(
        "--grid",
        default="0.05,0.15,0.25,0.35,0.45",
        help="comma-separated initial arc widths",
    )
    p_sweep.add_argument("--trials", type=int, default=100, help="Monte Carlo trials per evaluation")
    p_sweep.add_argument("--parallelism", type=int, default=1, help="worker processes")
    p_sweep.add_argument("--seed", type=int, default=None, help="base seed for trial derivation")
    p_sweep.add_argument("--horizon", type=float, default=None, help="override the trial horizon")
    p_sweep.add_argument("--algorithm", choices=("absolute", "relative"), default=None)
    p_sweep.add_argument("--spread-cap", type=float, default=1.0, help="upper end of the bisection interval")
    p_sweep.add_argument("--tol", type=float, default=0.01, help="bisection resolution")
    p_sweep.add_argument("--threshold", type=float, default=0.95, help="required per-point success rate")
    p_sweep.add_argument(
        "--synchronized-only",
        action="store_true",
        help="count only converged runs as successes (default also counts detections)",
    )
    p_sweep.add_argument("--output", default=None, help="write the frontier CSV here instead of stdout")
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
