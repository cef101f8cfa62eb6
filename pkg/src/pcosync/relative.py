"""Resilient synchronization protocol measuring relative frequencies.

Instead of broadcasting frequency values, every sender emits a start pulse
a fixed phase offset before firing and an end pulse at the fire itself.
A receiver stamps its own phase at both receptions; the offset divided by
the stamped span estimates the sender-to-receiver frequency ratio without
any unit agreement between clocks. Only end pulses drive the counter and
the phase-correction landmarks, which keeps the pulse plane identical to
the absolute-frequency protocol.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .engine import WorldState
from .errors import ProtocolFault
from .msr import EqualWeights, WeightPolicy, make_weights, msr_trim


def pulse_pair_ratio(start_stamp: float, end_stamp: float, zeta: float) -> float | None:
    """Frequency ratio estimate from one sender's stamped pulse pair.

    The receiver may legitimately fire (and so wrap its phase) between the
    two receptions whenever it runs ahead of the sender, so the span is the
    elapsed receiver phase modulo one cycle. Exactly coincident stamps give
    no estimate.
    """
    span = (end_stamp - start_stamp) % 1.0
    if span == 0.0:
        return None
    return zeta / span


@dataclass(frozen=True)
class RelativeParams:
    f: int
    zeta: float = 0.1
    weight_policy: WeightPolicy = field(default_factory=EqualWeights)
    eager_detection: bool = False

    def __post_init__(self) -> None:
        if self.f < 0:
            raise ValueError(f"fault bound must be nonnegative, got {self.f}")
        if not 0.0 < self.zeta < 0.5:
            raise ValueError(f"start-pulse offset must lie in (0, 0.5), got {self.zeta}")


class RelativeProtocol:
    uses_start_pulses = True

    def __init__(self, params: RelativeParams, ratio_log: list | None = None):
        """``ratio_log``, when given, collects one record per accepted ratio:
        (time, node, sender, ratio, receiver omega before update, sender
        omega at end-pulse emission or None for forged pulses). Diagnostic
        only; the protocol itself never reads it."""
        self.params = params
        self.ratio_log = ratio_log

    @property
    def zeta(self) -> float:
        return self.params.zeta

    # -- pulse plane --------------------------------------------------------

    def handle_start(self, world: WorldState, i: int, t: float) -> None:
        """Node i reaches the start-pulse threshold: stamp every listener."""
        osc = world.oscillators[i]
        osc.phase = 1.0 - self.params.zeta
        osc.start_emitted = True
        for j in world.graph.out_neighbors[i]:
            if j in world.normal:
                self.on_start_pulse(world, j, i, t)

    def handle_fire(self, world: WorldState, i: int, t: float) -> bool:
        osc = world.oscillators[i]
        osc.phase = 0.0
        osc.fired = True
        osc.start_emitted = False
        omega = osc.omega
        newly = False
        for j in world.graph.out_neighbors[i]:
            if j in world.normal:
                newly |= self.on_end_pulse(world, j, i, t, sender_omega=omega)
        return newly

    def on_start_pulse(self, world: WorldState, i: int, sender: int, t: float) -> None:
        osc = world.oscillators[i]
        # A pending stamp from a round the sender never closed is overwritten.
        osc.pending_start[sender] = osc.phase

    def on_end_pulse(
        self,
        world: WorldState,
        i: int,
        sender: int,
        t: float,
        sender_omega: float | None = None,
    ) -> bool:
        osc = world.oscillators[i]
        start = osc.pending_start.pop(sender, None)
        if start is not None:
            # Latest completed pair wins; a lone end pulse pairs with nothing.
            osc.pulse_pairs[sender] = (start, osc.phase, sender_omega)
        osc.pulse_count += 1
        c = osc.pulse_count
        d = world.graph.in_degree(i)
        f = self.params.f
        phi = osc.phase
        if c == f + 1:
            osc.jump_up = 1.0 - phi if phi >= 0.5 else 0.0
        if c == d - f:
            osc.jump_down = -phi if phi < 0.5 else 0.0
        if self.params.eager_detection and c > d and not osc.detected:
            osc.detected = True
            return True
        return False

    def deliver_adversary(
        self, world: WorldState, attacker: int, t: float, value: float, is_start: bool
    ) -> bool:
        newly = False
        for j in world.graph.out_neighbors[attacker]:
            if j not in world.normal:
                continue
            if is_start:
                self.on_start_pulse(world, j, attacker, t)
            else:
                newly |= self.on_end_pulse(world, j, attacker, t, sender_omega=None)
        return newly

    # -- update plane -------------------------------------------------------

    def handle_update(self, world: WorldState, i: int, t: float) -> bool:
        osc = world.oscillators[i]
        osc.phase = 0.5
        c = osc.pulse_count
        d = world.graph.in_degree(i)
        if c > d:
            osc.detected = True
            osc.reset_round()
            return True
        trim = self.params.f - (d - c)
        if trim < 0:
            raise ProtocolFault(
                f"node {i} heard only {c} of {d} in-neighbor pulses in a round; "
                f"the scenario violates the one-pulse-per-round precondition"
            )
        osc.phase = 0.5 + 0.5 * (osc.jump_up + osc.jump_down)

        zeta = self.params.zeta
        ratios: list[float] = []
        for j in world.graph.in_neighbors[i]:
            pair = osc.pulse_pairs.get(j)
            if pair is None:
                continue
            ratio = pulse_pair_ratio(pair[0], pair[1], zeta)
            if ratio is None:
                continue
            ratios.append(ratio)
            if self.ratio_log is not None:
                self.ratio_log.append((t, i, j, ratio, osc.omega, pair[2]))
        # Missing pairs (senders whose start or end pulse fell outside this
        # round) shrink the candidate set; with 2*trim or fewer candidates
        # the trim removes everything and the frequency holds for a round.
        kept = msr_trim(ratios, trim) if len(ratios) >= 2 * trim else []
        weights = make_weights(self.params.weight_policy, len(kept))
        omega = osc.omega
        # omega * (a_self + sum a_j * ratio_j) in deviation form, exact when
        # every kept ratio is 1.
        osc.omega = omega + omega * sum(w * (r - 1.0) for w, r in zip(weights[1:], kept))
        osc.reset_round()
        return False
