"""Monte Carlo frontier estimation.

For each initial arc width on a grid, bisect over the initial frequency
spread for the largest value at which the trial success rate stays at or
above a threshold. Trials are seeded per (grid point, trial index), not per
bisection evaluation, so every evaluation at one grid point reuses the same
underlying draws (common random numbers); this keeps the per-trial response
nearly monotone in the spread and makes serial and parallel execution
byte-identical.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .runner import run_scenario
from .scenario import ScenarioConfig


@dataclass(frozen=True)
class SweepSpec:
    """Template plus grid. ``base`` supplies everything a trial does not
    override: topology, algorithm, trim parameter, attackers, horizon,
    tolerances. Initial conditions in ``base`` are ignored."""

    base: ScenarioConfig
    arc_grid: tuple[float, ...]
    trials: int = 100
    spread_cap: float = 1.0
    bisect_tol: float = 0.01
    seed: int = 0
    success_threshold: float = 0.95
    synchronized_only: bool = False

    def __post_init__(self):
        if not self.arc_grid:
            raise ValueError("arc grid is empty")
        for value in self.arc_grid:
            if not 0.0 <= value < 0.5:
                raise ValueError(f"arc width {value} outside [0, 0.5)")
        if self.trials < 1:
            raise ValueError(f"need at least one trial, got {self.trials}")
        if self.bisect_tol <= 0.0:
            raise ValueError(f"bisection tolerance must be positive, got {self.bisect_tol}")


@dataclass(frozen=True)
class FrontierPoint:
    arc0: float
    spread0_max: float
    success_rate: float


def run_trial(
    base: ScenarioConfig,
    grid_index: int,
    trial_index: int,
    arc0: float,
    spread0: float,
    seed: int,
    synchronized_only: bool,
) -> bool:
    """One Monte Carlo trial; top level so process pools can pickle it.

    Phases are drawn uniformly on [0, arc0] and shifted so the slowest
    point sits exactly at 0; frequencies on [1, 1 + spread0] shifted so the
    minimum is exactly 1 (Sterbenz: both endpoints within a factor of two,
    so the subtraction is exact). Draw order is phases then frequencies,
    which keeps the phase sample fixed across bisection evaluations."""
    rng = np.random.default_rng(
        np.random.SeedSequence(seed, spawn_key=(grid_index, trial_index))
    )
    n = base.graph.node_count
    raw_phase = rng.uniform(0.0, arc0, size=n)
    phases = raw_phase - raw_phase.min()
    raw_freq = rng.uniform(1.0, 1.0 + spread0, size=n)
    freqs = (raw_freq - raw_freq.min()) + 1.0

    config = dataclasses.replace(
        base,
        phases=[float(p) for p in phases],
        frequencies=[float(w) for w in freqs],
        normalize_phases=False,
        normalize_frequencies=False,
        monitor="off",
        seed=trial_index,
    )
    result = run_scenario(config, validate=False, collect_trace=False)
    if result.outcome == "converged":
        return True
    return result.outcome == "detected" and not synchronized_only


class _Evaluator:
    """Runs one (grid point, spread) evaluation across all trials and
    aggregates by trial index, so completion order never matters."""

    def __init__(self, spec: SweepSpec, executor: ProcessPoolExecutor | None):
        self.spec = spec
        self.executor = executor

    def rate(self, grid_index: int, spread0: float) -> float:
        spec = self.spec
        arc0 = spec.arc_grid[grid_index]
        args = [
            (spec.base, grid_index, t, arc0, spread0, spec.seed, spec.synchronized_only)
            for t in range(spec.trials)
        ]
        if self.executor is None:
            outcomes = [run_trial(*a) for a in args]
        else:
            futures = [self.executor.submit(run_trial, *a) for a in args]
            outcomes = [f.result() for f in futures]
        return sum(outcomes) / spec.trials


def sweep_frontier(
    spec: SweepSpec,
    parallelism: int = 1,
    progress=None,
) -> list[FrontierPoint]:
    """Estimate the admissible-spread frontier over the arc grid.

    Per grid point: if the full spread cap already passes, report it; if
    even zero spread fails, report zero with its observed rate; otherwise
    bisect down to ``bisect_tol`` and report the largest passing spread.
    """
    executor = None
    if parallelism > 1:
        executor = ProcessPoolExecutor(max_workers=parallelism)
    try:
        evaluator = _Evaluator(spec, executor)
        points = []
        for gi, arc0 in enumerate(spec.arc_grid):
            point = _bisect_point(evaluator, gi, arc0, spec)
            points.append(point)
            if progress is not None:
                progress(point)
        return points
    finally:
        if executor is not None:
            executor.shutdown()


def _bisect_point(
    evaluator: _Evaluator, grid_index: int, arc0: float, spec: SweepSpec
) -> FrontierPoint:
    threshold = spec.success_threshold
    rate_cap = evaluator.rate(grid_index, spec.spread_cap)
    if rate_cap >= threshold:
        return FrontierPoint(arc0, spec.spread_cap, rate_cap)
    rate_zero = evaluator.rate(grid_index, 0.0)
    if rate_zero < threshold:
        return FrontierPoint(arc0, 0.0, rate_zero)
    lo, rate_lo = 0.0, rate_zero
    hi = spec.spread_cap
    while hi - lo > spec.bisect_tol:
        mid = 0.5 * (lo + hi)
        rate_mid = evaluator.rate(grid_index, mid)
        if rate_mid >= threshold:
            lo, rate_lo = mid, rate_mid
        else:
            hi = mid
    return FrontierPoint(arc0, lo, rate_lo)


def frontier_header() -> str:
    return "Delta0,delta0_max,success_rate"


def write_frontier(path: str | Path, points: list[FrontierPoint]) -> None:
    lines = [frontier_header()]
    for p in points:
        lines.append(f"{p.arc0!r},{p.spread0_max!r},{p.success_rate!r}")
    Path(path).write_text("\n".join(lines) + "\n")
