"""Trimmed-mean machinery and the absolute-frequency update rule."""

import pytest

from pcosync import (
    AbsoluteProtocol,
    ConfiguredAlpha,
    EqualWeights,
    MsrParams,
    OscillatorState,
    ProtocolFault,
    WorldState,
    complete_digraph,
    make_weights,
    msr_trim,
)
from pcosync.msr import effective_alpha


def test_trim_drops_extremes():
    assert msr_trim([1.0, 1.2, 1.5, 2.0], 1) == [1.2, 1.5]
    assert msr_trim([2.0, 1.0, 1.5, 1.2], 1) == [1.2, 1.5]
    assert msr_trim([3.0, 1.0, 2.0], 0) == [1.0, 2.0, 3.0]
    assert msr_trim([1.0, 1.0, 1.0], 1) == [1.0]
    # Exactly 2 * trim values leave nothing, which is legal.
    assert msr_trim([1.0, 2.0], 1) == []


def test_trim_guards():
    with pytest.raises(ProtocolFault):
        msr_trim([1.0, 2.0, 3.0], 2)
    with pytest.raises(ValueError):
        msr_trim([1.0], -1)


def test_equal_weights():
    assert make_weights(EqualWeights(), 3) == (0.25, 0.25, 0.25, 0.25)
    assert make_weights(EqualWeights(), 0) == (1.0,)


def test_configured_alpha_weights():
    w = make_weights(ConfiguredAlpha(0.2), 2)
    assert w == pytest.approx((0.6, 0.2, 0.2))
    assert sum(w) == pytest.approx(1.0)
    assert make_weights(ConfiguredAlpha(0.4), 0) == (1.0,)
    with pytest.raises(ValueError):
        make_weights(ConfiguredAlpha(0.3), 3)  # 4 * 0.3 > 1
    with pytest.raises(ValueError):
        make_weights(ConfiguredAlpha(0.0), 1)
    with pytest.raises(ValueError):
        make_weights(EqualWeights(), -1)


def test_weight_floor():
    assert effective_alpha(EqualWeights(), 5) == pytest.approx(1.0 / 6.0)
    assert effective_alpha(ConfiguredAlpha(0.3), 99) == 0.3


def test_params_reject_negative_fault_bound():
    with pytest.raises(ValueError):
        MsrParams(f=-1)


# -- absolute-frequency update rule, driven white box ------------------------


def k5_world(**state0):
    graph = complete_digraph(5)
    oscillators = [OscillatorState(phase=0.0, omega=1.0) for _ in range(5)]
    world = WorldState(
        graph=graph,
        oscillators=oscillators,
        normal=frozenset(range(5)),
        faulty=frozenset(),
    )
    for key, value in state0.items():
        setattr(world.oscillators[0], key, value)
    return world


def test_update_worked_example():
    """Node 0 on a complete 5-node graph, trimming one value per side.

    Four pulses land at phases 0.9, 0.95, 0.2, 0.3 claiming 1.2, 0.8, 1.1,
    1.05. The second pulse (count f+1 = 2, phase in the upper half) captures
    jump_up = 0.05; the third (count d-f = 3, lower half) captures
    jump_down = -0.2. At the update: phase 0.5 + (0.05 - 0.2)/2 = 0.425,
    and the trimmed mean keeps {1.05, 1.1} so with equal weights
    omega = 1 + (0.05 + 0.1)/3 = 1.05.
    """
    world = k5_world(omega=1.0)
    proto = AbsoluteProtocol(MsrParams(f=1))
    osc = world.oscillators[0]

    osc.phase = 0.90
    proto.on_pulse(world, 0, 1.2, t=0.0)
    osc.phase = 0.95
    proto.on_pulse(world, 0, 0.8, t=0.0)
    assert osc.jump_up == pytest.approx(0.05)
    osc.phase = 0.20
    proto.on_pulse(world, 0, 1.1, t=0.0)
    assert osc.jump_down == pytest.approx(-0.2)
    osc.phase = 0.30
    proto.on_pulse(world, 0, 1.05, t=0.0)

    osc.fired = True
    osc.phase = 0.5
    detected = proto.handle_update(world, 0, t=1.5)
    assert not detected
    assert osc.phase == pytest.approx(0.425)
    assert osc.omega == pytest.approx(1.05)
    # Round state is cleared for the next cycle.
    assert osc.pulse_count == 0
    assert osc.freq_buffer == []
    assert not osc.fired
    assert osc.jump_up == 0.0 and osc.jump_down == 0.0


def test_jump_landmarks_respect_half_circle_gating():
    # Landmark pulses on the wrong half circle contribute no jump.
    world = k5_world()
    proto = AbsoluteProtocol(MsrParams(f=1))
    osc = world.oscillators[0]
    osc.phase = 0.30
    proto.on_pulse(world, 0, 1.0, t=0.0)
    proto.on_pulse(world, 0, 1.0, t=0.0)  # count 2 = f+1, phase < 0.5
    assert osc.jump_up == 0.0
    osc.phase = 0.80
    proto.on_pulse(world, 0, 1.0, t=0.0)  # count 3 = d-f, phase >= 0.5
    assert osc.jump_down == 0.0


def test_homogeneous_values_leave_frequency_exactly_fixed():
    world = k5_world(omega=1.3)
    proto = AbsoluteProtocol(MsrParams(f=1))
    osc = world.oscillators[0]
    osc.phase = 0.6
    for _ in range(4):
        proto.on_pulse(world, 0, 1.3, t=0.0)
    osc.fired = True
    osc.phase = 0.5
    proto.handle_update(world, 0, t=1.0)
    assert osc.omega == 1.3


def test_configured_alpha_update():
    world = k5_world(omega=1.0)
    proto = AbsoluteProtocol(MsrParams(f=1, weight_policy=ConfiguredAlpha(0.2)))
    osc = world.oscillators[0]
    osc.phase = 0.6
    for value in (1.2, 0.8, 1.1, 1.05):
        proto.on_pulse(world, 0, value, t=0.0)
    osc.fired = True
    osc.phase = 0.5
    proto.handle_update(world, 0, t=1.0)
    assert osc.omega == pytest.approx(1.0 + 0.2 * 0.05 + 0.2 * 0.1)


def test_counter_overflow_detected_at_update():
    world = k5_world(omega=1.0)
    proto = AbsoluteProtocol(MsrParams(f=1))
    osc = world.oscillators[0]
    osc.phase = 0.6
    for _ in range(5):  # in-degree is 4
        proto.on_pulse(world, 0, 1.0, t=0.0)
    osc.fired = True
    osc.phase = 0.5
    assert proto.handle_update(world, 0, t=1.0) is True
    assert osc.detected
    assert osc.phase == 0.5  # no jump on a detection round
    assert osc.omega == 1.0
    assert osc.pulse_count == 0


def test_eager_detection_latches_on_the_overflowing_pulse():
    world = k5_world(omega=1.0)
    proto = AbsoluteProtocol(MsrParams(f=1, eager_detection=True))
    osc = world.oscillators[0]
    osc.phase = 0.6
    for _ in range(4):
        assert proto.on_pulse(world, 0, 1.0, t=0.0) is False
    assert proto.on_pulse(world, 0, 1.0, t=0.0) is True
    assert osc.detected


def test_underheard_round_is_a_protocol_fault():
    world = k5_world(omega=1.0)
    proto = AbsoluteProtocol(MsrParams(f=1))
    osc = world.oscillators[0]
    osc.phase = 0.6
    proto.on_pulse(world, 0, 1.0, t=0.0)
    proto.on_pulse(world, 0, 1.0, t=0.0)
    osc.fired = True
    osc.phase = 0.5
    with pytest.raises(ProtocolFault):
        proto.handle_update(world, 0, t=1.0)  # heard 2 < d - f = 3


def test_absolute_protocol_has_no_start_pulses():
    world = k5_world()
    proto = AbsoluteProtocol(MsrParams(f=0))
    assert proto.uses_start_pulses is False
    with pytest.raises(ProtocolFault):
        proto.handle_start(world, 0, t=0.0)
