"""Synchronization diagnostics: spreads, windows, the virtual reference
oscillator, analytic admissibility bounds, and per-event safety checks.

Quantities indexed by k live on the event sequence, not on wall time; the
window convention pads with event-0 values, which a ring buffer seeded at
event 0 reproduces exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .engine import Event, EventKind, WorldState
from .errors import InvariantViolation
from .phase import clockwise_dist, containing_arc

MONITOR_MODES = ("off", "warn", "strict")


def phase_spread(world: WorldState) -> float:
    """Length of the containing arc over normal phases only."""
    return containing_arc(world.normal_phases()).length


def decay_envelope(
    spread0: float, alpha: float, window_len: int, normal_count: int, k: int
) -> float:
    """Analytic upper bound on the windowed frequency spread at event k.

    One contraction by (1 - alpha**(window_len * normal_count) / 2) is
    guaranteed per ``window_len * normal_count`` events.
    """
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"weight floor must be in (0, 1], got {alpha}")
    period = window_len * normal_count
    base = 1.0 - alpha**period / 2.0
    return base ** (k // period) * spread0


def check_initial_bound(
    variant: str,
    *,
    arc0: float,
    spread0: float,
    node_count: int,
    normal_count: int,
    alpha: float,
    window_len: int | None = None,
    zeta: float = 0.1,
) -> tuple[bool, float, float]:
    """Evaluate one of the analytic initial-condition bounds.

    Variants: "strict" (window fixed at the universal 2N), "relaxed"
    (any window length over which every node provably updates), and
    "relative" (the relaxed form with the threshold shrunk by the
    start-pulse offset). Returns (satisfied, lhs, rhs). The coefficient is
    astronomically conservative by design; these are sufficient conditions,
    not operating envelopes.
    """
    if variant not in ("strict", "relaxed", "relative"):
        raise ValueError(f"unknown bound variant {variant!r}")
    n, r = node_count, normal_count
    if variant == "strict":
        exponent = 2 * n * r
        numerator = 4.0 * n * r
    else:
        kbar = 2 * n if window_len is None else window_len
        exponent = kbar * r
        numerator = 2.0 * kbar * r
    denom = alpha**exponent
    coeff = float("inf") if denom == 0.0 else numerator / denom
    lhs = arc0 if spread0 == 0.0 else arc0 + coeff * spread0
    rhs = 0.5 - zeta if variant == "relative" else 0.5
    return (lhs < rhs, lhs, rhs)


class SpreadWindow:
    """Sliding extrema over the last ``window_len`` per-event (lo, hi) pairs."""

    def __init__(self, window_len: int):
        if window_len < 1:
            raise ValueError(f"window length must be positive, got {window_len}")
        self.window_len = window_len
        self._lo: deque[float] = deque(maxlen=window_len)
        self._hi: deque[float] = deque(maxlen=window_len)

    def push(self, lo: float, hi: float) -> tuple[float, float, float]:
        """Append one event's extrema; return (windowed min, windowed max,
        their difference)."""
        self._lo.append(lo)
        self._hi.append(hi)
        m = min(self._lo)
        big = max(self._hi)
        return m, big, big - m


@dataclass
class VirtualNode:
    """Free-running reference oscillator: never jumps, never fires, and
    tracks the windowed frequency floor of the normal population."""

    phase: float = 0.0
    omega: float = 1.0

    def advance(self, dt: float) -> None:
        self.phase = (self.phase + self.omega * dt) % 1.0


@dataclass
class TraceRecord:
    k: int
    t: float
    event_kind: str
    node: int
    phases: tuple[float, ...]
    omegas: tuple[float, ...]
    delta: float
    delta_windowed: float
    v: float
    detected_mask: int


def trace_header(node_count: int) -> str:
    cols = ["k", "t", "event_kind", "node"]
    cols += [f"phi_{i}" for i in range(node_count)]
    cols += [f"omega_{i}" for i in range(node_count)]
    cols += ["Delta", "delta_windowed", "V", "detected_mask"]
    return ",".join(cols)


def format_trace_row(row: TraceRecord) -> str:
    parts = [str(row.k), repr(row.t), row.event_kind, str(row.node)]
    parts += [repr(p) for p in row.phases]
    parts += [repr(w) for w in row.omegas]
    parts += [repr(row.delta), repr(row.delta_windowed), repr(row.v), str(row.detected_mask)]
    return ",".join(parts)


def write_trace(path: str | Path, node_count: int, rows: list[TraceRecord]) -> None:
    lines = [trace_header(node_count)]
    lines += [format_trace_row(r) for r in rows]
    Path(path).write_text("\n".join(lines) + "\n")


class RunMetrics:
    """Per-event observer: maintains spreads, windows, the virtual node,
    convergence state, and the safety checks.

    ``mode`` controls what a failed check does: "off" skips it, "warn"
    records it in ``violations``, "strict" raises InvariantViolation.
    Safety checks express guarantees that only hold on conforming runs
    (stealthy scripts, admissible initial conditions), which is why the
    default everywhere outside the test suite is "warn".
    """

    _MAX_RECORDED_VIOLATIONS = 200

    def __init__(
        self,
        world: WorldState,
        *,
        alpha: float,
        window_len: int | None = None,
        mode: str = "warn",
        tol_phase: float = 1e-6,
        tol_freq: float = 1e-6,
        collect_trace: bool = True,
    ):
        if mode not in MONITOR_MODES:
            raise ValueError(f"monitor mode must be one of {MONITOR_MODES}, got {mode!r}")
        n = world.graph.node_count
        self.mode = mode
        self.alpha = alpha
        self.window_len = 2 * n if window_len is None else window_len
        self.tol_phase = tol_phase
        self.tol_freq = tol_freq
        self.normal_count = len(world.normal_ids)

        omegas0 = world.normal_omegas()
        self.hull = (min(omegas0), max(omegas0))
        self.spread0 = self.hull[1] - self.hull[0]
        self.delta0 = phase_spread(world)

        self.freq_window = SpreadWindow(self.window_len)
        self.radius_window = SpreadWindow(self.window_len)
        self.virtual = VirtualNode(phase=0.0, omega=self.hull[0])

        self.violations: list[str] = []
        self._suppressed = 0
        self.detection_events: list[tuple[int, float, int]] = []
        self._detected_seen: set[int] = set()
        self.converged = False
        self._streak = 0
        self._last_update_k: dict[int, int] = {i: 0 for i in world.normal_ids}
        self.measured_window = 0
        self.virtual_in_range = True
        self.rows: list[TraceRecord] | None = [] if collect_trace else None

        floor, ceiling, _ = self.freq_window.push(self.hull[0], self.hull[1])
        radii = [clockwise_dist(p, self.virtual.phase) for p in world.normal_phases()]
        _, _, v0 = self.radius_window.push(min(radii), max(radii))
        self.last = self._snapshot(
            world, 0, "init", -1, delta_windowed=ceiling - floor, v=v0
        )
        self._prev_floor = floor
        self._prev_ceiling = ceiling
        if self.rows is not None:
            self.rows.append(self.last)

    # -- engine hooks --------------------------------------------------------

    def advance(self, dt: float) -> None:
        self.virtual.advance(dt)

    def observe(self, world: WorldState, event: Event) -> TraceRecord:
        k = world.event_count
        phases = world.normal_phases()
        omegas = world.normal_omegas()
        lo, hi = min(omegas), max(omegas)
        floor, ceiling, spread_w = self.freq_window.push(lo, hi)
        self.virtual.omega = floor
        radii = [clockwise_dist(p, self.virtual.phase) for p in phases]
        _, _, v = self.radius_window.push(min(radii), max(radii))
        delta = containing_arc(phases).length

        if self.mode != "off":
            self._check(f"frequency left the initial hull at event {k}",
                        lo >= self.hull[0] - 1e-9 and hi <= self.hull[1] + 1e-9)
            self._check(f"containing arc reached {delta:.6f} >= 0.5 at event {k}",
                        delta < 0.5)
            self._check(f"windowed frequency floor decreased at event {k}",
                        floor >= self._prev_floor - 1e-12)
            self._check(f"windowed frequency ceiling increased at event {k}",
                        ceiling <= self._prev_ceiling + 1e-12)
            envelope = decay_envelope(
                self.spread0, self.alpha, self.window_len, self.normal_count, k
            )
            self._check(
                f"windowed spread {spread_w:.3e} broke its decay envelope at event {k}",
                spread_w <= envelope + 1e-9,
            )
            # The tail and radius-spread properties read the virtual node as
            # the rear of the shortest containing arc, which is only defined
            # while that arc spans less than a half circle.  The reference
            # runs at the windowed floor, so a wide or slow start lets the
            # pack pull more than half a turn ahead; past that point the arc
            # flips orientation and the two checks stop being meaningful for
            # the rest of the run.
            arc_with_virtual = containing_arc(phases + [self.virtual.phase]).length
            if self.virtual_in_range and arc_with_virtual >= 0.5:
                self.virtual_in_range = False
            if self.virtual_in_range:
                self._check(
                    f"virtual node left the tail of the containing arc at event {k}",
                    abs(arc_with_virtual - max(radii)) <= 1e-9,
                )
                self._check(
                    f"containing arc exceeded the virtual-radius spread at event {k}",
                    delta <= v + 1e-9,
                )
        self._prev_floor = floor
        self._prev_ceiling = ceiling

        if event.kind is EventKind.UPDATE:
            gap = k - self._last_update_k[event.node]
            self.measured_window = max(self.measured_window, gap)
            self._last_update_k[event.node] = k

        for i in world.normal_ids:
            if world.oscillators[i].detected and i not in self._detected_seen:
                self._detected_seen.add(i)
                self.detection_events.append((k, event.time, i))

        if delta <= self.tol_phase and hi - lo <= self.tol_freq:
            self._streak += 1
            if self._streak >= self.window_len:
                self.converged = True
        else:
            self._streak = 0

        record = self._snapshot(
            world, k, event.kind.value, event.node, delta=delta,
            delta_windowed=spread_w, v=v,
        )
        self.last = record
        if self.rows is not None:
            self.rows.append(record)
        return record

    # -- internals -----------------------------------------------------------

    def _check(self, message: str, ok: bool) -> None:
        if ok:
            return
        if self.mode == "strict":
            raise InvariantViolation(message)
        if len(self.violations) < self._MAX_RECORDED_VIOLATIONS:
            self.violations.append(message)
        else:
            self._suppressed += 1

    def _snapshot(
        self,
        world: WorldState,
        k: int,
        kind: str,
        node: int,
        delta: float | None = None,
        delta_windowed: float = 0.0,
        v: float = 0.0,
    ) -> TraceRecord:
        mask = 0
        for i in world.normal_ids:
            if world.oscillators[i].detected:
                mask |= 1 << i
        return TraceRecord(
            k=k,
            t=world.clock,
            event_kind=kind,
            node=node,
            phases=tuple(o.phase for o in world.oscillators),
            omegas=tuple(o.omega for o in world.oscillators),
            delta=phase_spread(world) if delta is None else delta,
            delta_windowed=delta_windowed,
            v=v,
            detected_mask=mask,
        )

    def suppressed_violations(self) -> int:
        return self._suppressed
