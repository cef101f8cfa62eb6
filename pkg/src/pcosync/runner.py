"""Single-scenario execution: validate, build, simulate, collect results."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .engine import WorldState, simulate
from .errors import ProtocolFault, ScenarioValidationError
from .metrics import RunMetrics, write_trace
from .relative import RelativeProtocol
from .scenario import ScenarioConfig

OUTCOMES = ("converged", "detected", "horizon", "fault")


@dataclass
class RunResult:
    outcome: str
    world: WorldState
    metrics: RunMetrics
    config: ScenarioConfig
    violations: list[str] = field(default_factory=list)
    info: list[str] = field(default_factory=list)
    fault_message: str = ""
    ratio_log: list | None = None

    @property
    def detections(self) -> list[tuple[int, float, int]]:
        """(event index, time, node) triples, in detection order."""
        return self.metrics.detection_events


def run_scenario(
    config: ScenarioConfig,
    *,
    force: bool = False,
    validate: bool = True,
    collect_trace: bool = False,
    trace_path: str | Path | None = None,
    collect_ratios: bool = False,
) -> RunResult:
    """Execute one scenario end to end.

    Validation violations abort unless ``force`` is set; sweeps that
    generate admissible configs by construction pass ``validate=False`` to
    skip the exhaustive robustness recheck on every trial. A protocol fault
    is reported as the "fault" outcome rather than propagated, so batch
    callers can count it alongside the other outcomes.
    """
    violations: list[str] = []
    info: list[str] = []
    if validate:
        violations, info = config.validate()
        if violations and not force:
            raise ScenarioValidationError(violations)

    world, protocol, scripts = config.build()
    if collect_ratios and isinstance(protocol, RelativeProtocol):
        protocol.ratio_log = []
    metrics = RunMetrics(
        world,
        alpha=config.effective_alpha(),
        window_len=config.window_len,
        mode=config.monitor,
        tol_phase=config.tol_phase,
        tol_freq=config.tol_freq,
        collect_trace=collect_trace or trace_path is not None,
    )

    fault_message = ""
    try:
        outcome = simulate(
            world,
            protocol,
            scripts,
            horizon=config.horizon,
            metrics=metrics,
            halt_on_detection=config.halt_on_detection,
        )
    except ProtocolFault as exc:
        outcome = "fault"
        fault_message = str(exc)

    if trace_path is not None and metrics.rows is not None:
        write_trace(trace_path, world.graph.node_count, metrics.rows)

    return RunResult(
        outcome=outcome,
        world=world,
        metrics=metrics,
        config=config,
        violations=violations,
        info=info,
        fault_message=fault_message,
        ratio_log=getattr(protocol, "ratio_log", None),
    )
