"""Oscillator state containers and the deterministic event loop.

Between events every oscillator's phase grows linearly at its own rate;
everything discontinuous (pulse emission, counter updates, phase jumps,
frequency updates, detection) happens inside an event handler. Events are
totally ordered by time, then by kind (adversary pulse, fire, start pulse,
update trigger), then by node id; two times closer than ``TIME_EPS`` count
as simultaneous. After each event the acting node's phase sits exactly on
its threshold value, so threshold comparisons never accumulate drift.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import InvariantViolation
from .graph import DirectedGraph

TIME_EPS = 1e-12
PHASE_SLACK = 1e-9  # tolerated floating-point overshoot past a threshold


class EventKind(enum.Enum):
    ADVERSARY_PULSE = "adversary_pulse"
    FIRE = "fire"
    START_PULSE = "start_pulse"
    UPDATE = "update"


_PRIORITY_TO_KIND = {
    0: EventKind.ADVERSARY_PULSE,
    1: EventKind.FIRE,
    2: EventKind.START_PULSE,
    3: EventKind.UPDATE,
}


@dataclass
class Event:
    time: float
    kind: EventKind
    node: int
    sequence_index: int = -1
    # Only adversary pulses distinguish a forged start pulse from a counted one.
    is_start: bool = False


@dataclass
class OscillatorState:
    """Per-node protocol state.

    ``fired`` marks that the node has fired since its last update, which
    arms the mid-cycle update trigger. ``jump_up``/``jump_down`` hold the
    two phase-correction ingredients captured when the pulse counter
    crosses its lower and upper landmarks; each is written at most once
    per round. The pairing dicts are only used by the relative-frequency
    protocol: ``pending_start`` maps sender id to the receiver's phase at
    an unmatched start pulse, ``pulse_pairs`` to the latest completed
    (start stamp, end stamp, sender frequency or None if forged) triple.
    """

    phase: float
    omega: float
    fired: bool = False
    pulse_count: int = 0
    freq_buffer: list[float] = field(default_factory=list)
    jump_up: float = 0.0
    jump_down: float = 0.0
    pending_start: dict[int, float] = field(default_factory=dict)
    pulse_pairs: dict[int, tuple[float, float, float | None]] = field(default_factory=dict)
    start_emitted: bool = False
    detected: bool = False

    def reset_round(self) -> None:
        """End-of-round cleanup shared by both protocols."""
        self.fired = False
        self.pulse_count = 0
        self.freq_buffer.clear()
        self.jump_up = 0.0
        self.jump_down = 0.0
        self.pending_start.clear()
        self.pulse_pairs.clear()


@dataclass
class WorldState:
    graph: DirectedGraph
    oscillators: list[OscillatorState]
    normal: frozenset[int]
    faulty: frozenset[int]
    clock: float = 0.0
    event_count: int = 0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        n = self.graph.node_count
        if len(self.oscillators) != n:
            raise ValueError("one oscillator state required per graph node")
        if self.normal & self.faulty:
            raise ValueError("a node cannot be both normal and faulty")
        if self.normal | self.faulty != frozenset(range(n)):
            raise ValueError("normal and faulty sets must partition the nodes")
        self.normal_ids = tuple(sorted(self.normal))

    def normal_phases(self) -> list[float]:
        return [self.oscillators[i].phase for i in self.normal_ids]

    def normal_omegas(self) -> list[float]:
        return [self.oscillators[i].omega for i in self.normal_ids]


def advance_all(world: WorldState, dt: float) -> None:
    """Advance every phase by its own rate for ``dt`` time units.

    Normal phases must not cross a threshold during the advance (the caller
    picks ``dt`` from the earliest pending event), so they never wrap here.
    Faulty oscillators carry no protocol state; their displayed phase
    free-runs modulo 1.
    """
    if dt < 0.0:
        raise ValueError(f"cannot advance time by {dt}")
    if dt == 0.0:
        return
    normal = world.normal
    for i, osc in enumerate(world.oscillators):
        moved = osc.phase + osc.omega * dt
        if i in normal:
            if moved > 1.0 + PHASE_SLACK:
                raise InvariantViolation(
                    f"node {i} overshot its firing threshold (phase {moved}) "
                    f"after event {world.event_count}"
                )
            osc.phase = moved
        else:
            osc.phase = moved % 1.0
    world.clock += dt


def next_event(world: WorldState, protocol, pending_adversary=()) -> Event | None:
    """Peek the next event: earliest threshold crossing or scripted pulse.

    ``pending_adversary`` holds (time, node, is_start) triples sorted by
    that tuple; only the head competes. Ties within ``TIME_EPS`` resolve by
    kind priority then node id. Returns None when nothing is pending.
    """
    candidates: list[tuple[float, int, int, int]] = []  # time, priority, node, start_rank
    uses_start = protocol.uses_start_pulses
    start_target = 1.0 - protocol.zeta if uses_start else 0.0
    for i in world.normal_ids:
        osc = world.oscillators[i]
        candidates.append(
            (world.clock + max(0.0, 1.0 - osc.phase) / osc.omega, 1, i, 0)
        )
        if osc.fired and not osc.detected:
            if osc.phase > 0.5 + PHASE_SLACK:
                raise InvariantViolation(
                    f"node {i} armed for update but past half phase ({osc.phase}) "
                    f"after event {world.event_count}"
                )
            candidates.append(
                (world.clock + max(0.0, 0.5 - osc.phase) / osc.omega, 3, i, 0)
            )
        if uses_start and not osc.start_emitted and osc.phase <= start_target + PHASE_SLACK:
            candidates.append(
                (world.clock + max(0.0, start_target - osc.phase) / osc.omega, 2, i, 0)
            )
    if pending_adversary:
        t, node, is_start = pending_adversary[0]
        candidates.append((t, 0, node, 1 if is_start else 0))
    if not candidates:
        return None
    tmin = min(c[0] for c in candidates)
    best = min(
        (c for c in candidates if c[0] <= tmin + TIME_EPS),
        key=lambda c: (c[1], c[2], c[3]),
    )
    return Event(time=best[0], kind=_PRIORITY_TO_KIND[best[1]], node=best[2], is_start=bool(best[3]))


def event_budget(n: int, scripted_pulses: int, horizon: float, safety: float = 4.0) -> int:
    """Hard cap on processed events; exceeding it aborts the run as a
    liveness failure rather than looping forever."""
    return int((2 * n + scripted_pulses) * (horizon + 1.0) * safety) + 16


def simulate(
    world: WorldState,
    protocol,
    scripts,
    *,
    horizon: float,
    metrics,
    halt_on_detection: bool = True,
    zeno_safety: float = 4.0,
) -> str:
    """Run the event loop to the horizon, convergence, or detection.

    ``protocol`` supplies the threshold handlers (see the absolute and
    relative modules); ``metrics`` observes every event and owns the
    convergence and safety bookkeeping. Returns an outcome string:
    "converged", "detected", or "horizon".
    """
    if horizon < 0.0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    pending: list[tuple[float, int, int]] = []
    for script in scripts:
        for t in script.emission_times(horizon):
            pending.append((t, script.node, 0))
        for t in script.start_emission_times(horizon):
            pending.append((t, script.node, 1))
    pending.sort()
    script_by_node = {script.node: script for script in scripts}

    budget = event_budget(world.graph.node_count, len(pending), horizon, zeno_safety)
    cursor = 0
    outcome = "horizon"
    while True:
        ev = next_event(world, protocol, pending[cursor : cursor + 1])
        if ev is None or ev.time > horizon + TIME_EPS:
            break
        dt = max(0.0, ev.time - world.clock)
        advance_all(world, dt)
        metrics.advance(dt)
        world.clock = ev.time

        if ev.kind is EventKind.ADVERSARY_PULSE:
            cursor += 1
            script = script_by_node[ev.node]
            value = 0.0 if ev.is_start else script.freq_claim(ev.time)
            newly_detected = protocol.deliver_adversary(
                world, ev.node, ev.time, value, ev.is_start
            )
        elif ev.kind is EventKind.FIRE:
            newly_detected = protocol.handle_fire(world, ev.node, ev.time)
        elif ev.kind is EventKind.START_PULSE:
            protocol.handle_start(world, ev.node, ev.time)
            newly_detected = False
        else:
            newly_detected = protocol.handle_update(world, ev.node, ev.time)

        world.event_count += 1
        ev.sequence_index = world.event_count
        metrics.observe(world, ev)

        if world.event_count > budget:
            raise InvariantViolation(
                f"event {world.event_count} exceeded the liveness budget of {budget}"
            )
        if newly_detected and halt_on_detection:
            outcome = "detected"
            break
        if metrics.converged:
            outcome = "converged"
            break
    return outcome
