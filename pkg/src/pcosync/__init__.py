"""Resilient synchronization of pulse-coupled oscillator networks.

Deterministic discrete-event simulation of trimmed-mean frequency consensus
over a unit phase circle, with scripted misbehaving nodes, an exhaustive
graph robustness checker, per-event safety diagnostics, and a Monte Carlo
frontier harness.
"""

from .absolute import AbsoluteProtocol, MsrParams
from .adversary import (
    AttackScript,
    custom_script,
    flooding_script,
    is_stealthy,
    one_plus_abs_sin,
    parse_claim,
    sawtooth,
    silent_script,
    stealthy_script,
)
from .engine import (
    Event,
    EventKind,
    OscillatorState,
    WorldState,
    simulate,
)
from .errors import (
    GraphTooLargeError,
    InvariantViolation,
    ProtocolFault,
    ScenarioValidationError,
)
from .graph import (
    DirectedGraph,
    complete_digraph,
    demo_graph_8,
    directed_ring,
    format_graph_text,
    is_r_robust,
    load_graph,
    max_robustness,
    parse_graph_text,
    random_digraph,
)
from .metrics import (
    RunMetrics,
    SpreadWindow,
    TraceRecord,
    VirtualNode,
    check_initial_bound,
    decay_envelope,
    write_trace,
)
from .msr import ConfiguredAlpha, EqualWeights, make_weights, msr_trim
from .phase import Arc, clockwise_dist, containing_arc, time_to_phase
from .relative import RelativeParams, RelativeProtocol, pulse_pair_ratio
from .runner import RunResult, run_scenario
from .scenario import (
    AttackerSpec,
    RandomInterval,
    ScenarioConfig,
    load_scenario,
    scenario_from_dict,
)
from .sweep import FrontierPoint, SweepSpec, sweep_frontier, write_frontier

__version__ = "0.1.0"

__all__ = [
    "AbsoluteProtocol",
    "Arc",
    "AttackScript",
    "AttackerSpec",
    "ConfiguredAlpha",
    "DirectedGraph",
    "EqualWeights",
    "Event",
    "EventKind",
    "FrontierPoint",
    "GraphTooLargeError",
    "InvariantViolation",
    "MsrParams",
    "OscillatorState",
    "ProtocolFault",
    "RandomInterval",
    "RelativeParams",
    "RelativeProtocol",
    "RunMetrics",
    "RunResult",
    "ScenarioConfig",
    "ScenarioValidationError",
    "SpreadWindow",
    "SweepSpec",
    "TraceRecord",
    "VirtualNode",
    "WorldState",
    "check_initial_bound",
    "clockwise_dist",
    "complete_digraph",
    "containing_arc",
    "custom_script",
    "decay_envelope",
    "demo_graph_8",
    "directed_ring",
    "flooding_script",
    "format_graph_text",
    "is_r_robust",
    "is_stealthy",
    "load_graph",
    "load_scenario",
    "make_weights",
    "max_robustness",
    "msr_trim",
    "one_plus_abs_sin",
    "parse_claim",
    "pulse_pair_ratio",
    "random_digraph",
    "run_scenario",
    "sawtooth",
    "scenario_from_dict",
    "silent_script",
    "simulate",
    "stealthy_script",
    "sweep_frontier",
    "time_to_phase",
    "write_frontier",
    "write_trace",
]
