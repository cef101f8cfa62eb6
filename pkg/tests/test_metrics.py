"""Diagnostics: envelopes, admissibility bounds, windows, safety checks."""

import math
from pathlib import Path

import pytest

from pcosync import (
    Event,
    EventKind,
    InvariantViolation,
    OscillatorState,
    RunMetrics,
    SpreadWindow,
    TraceRecord,
    VirtualNode,
    WorldState,
    check_initial_bound,
    complete_digraph,
    decay_envelope,
    load_scenario,
    run_scenario,
)
from pcosync.metrics import format_trace_row, phase_spread, trace_header, write_trace

REPO = Path(__file__).resolve().parent.parent


def test_decay_envelope_steps_once_per_period():
    # window 2, one normal node: period 2, contraction 1 - 0.5**2 / 2.
    assert decay_envelope(1.0, 0.5, 2, 1, 0) == 1.0
    assert decay_envelope(1.0, 0.5, 2, 1, 1) == 1.0
    assert decay_envelope(1.0, 0.5, 2, 1, 2) == pytest.approx(0.875)
    assert decay_envelope(1.0, 0.5, 2, 1, 4) == pytest.approx(0.875**2)
    values = [decay_envelope(0.3, 0.25, 3, 2, k) for k in range(60)]
    assert all(a >= b for a, b in zip(values, values[1:]))
    with pytest.raises(ValueError):
        decay_envelope(1.0, 0.0, 2, 1, 0)
    with pytest.raises(ValueError):
        decay_envelope(1.0, 1.5, 2, 1, 0)


def test_initial_bound_hand_value():
    ok, lhs, rhs = check_initial_bound(
        "relaxed",
        arc0=0.1,
        spread0=0.002,
        node_count=2,
        normal_count=1,
        alpha=0.5,
    )
    # Default window 2N = 4: coefficient 8 / 0.5**4 = 128.
    assert lhs == pytest.approx(0.1 + 128 * 0.002)
    assert rhs == 0.5
    assert ok

    ok, lhs, _ = check_initial_bound(
        "relaxed",
        arc0=0.1,
        spread0=0.002,
        node_count=3,
        normal_count=2,
        alpha=0.5,
        window_len=4,
    )
    assert lhs == pytest.approx(0.1 + (16.0 / 0.5**8) * 0.002)
    assert not ok


def test_initial_bound_zero_spread_reduces_to_the_arc():
    ok, lhs, rhs = check_initial_bound(
        "strict", arc0=0.4, spread0=0.0, node_count=8, normal_count=6, alpha=1 / 7
    )
    assert (ok, lhs, rhs) == (True, 0.4, 0.5)
    ok, lhs, _ = check_initial_bound(
        "strict", arc0=0.6, spread0=0.0, node_count=8, normal_count=6, alpha=1 / 7
    )
    assert not ok and lhs == 0.6


def test_initial_bound_is_conservative_for_real_spreads():
    # Any visible frequency spread blows up the coefficient at this size.
    ok, lhs, _ = check_initial_bound(
        "strict", arc0=0.1, spread0=0.4, node_count=8, normal_count=6, alpha=1 / 7
    )
    assert not ok and lhs > 1e50


def test_initial_bound_relative_variant_shrinks_the_threshold():
    ok, lhs, rhs = check_initial_bound(
        "relative",
        arc0=0.45,
        spread0=0.0,
        node_count=5,
        normal_count=5,
        alpha=0.2,
        zeta=0.1,
    )
    assert rhs == pytest.approx(0.4)
    assert not ok and lhs == 0.45


def test_initial_bound_underflow_reports_infinity():
    ok, lhs, _ = check_initial_bound(
        "strict", arc0=0.1, spread0=0.1, node_count=8, normal_count=6, alpha=1e-4
    )
    assert not ok and math.isinf(lhs)


def test_initial_bound_rejects_unknown_variant():
    with pytest.raises(ValueError):
        check_initial_bound(
            "loose", arc0=0.1, spread0=0.0, node_count=2, normal_count=2, alpha=0.5
        )


def test_spread_window_tracks_sliding_extrema():
    win = SpreadWindow(2)
    assert win.push(1.0, 2.0) == (1.0, 2.0, 1.0)
    assert win.push(0.5, 1.5) == (0.5, 2.0, 1.5)
    lo, hi, diff = win.push(1.2, 1.3)
    assert (lo, hi) == (0.5, 1.5)
    assert diff == pytest.approx(1.0)
    assert win.push(1.2, 1.2) == (1.2, 1.3, pytest.approx(0.1))
    with pytest.raises(ValueError):
        SpreadWindow(0)


def test_virtual_node_advances_modulo_one():
    v = VirtualNode(phase=0.9, omega=1.0)
    v.advance(0.2)
    assert v.phase == pytest.approx(0.1)


def test_trace_row_roundtrips_through_repr():
    assert trace_header(2) == (
        "k,t,event_kind,node,phi_0,phi_1,omega_0,omega_1,"
        "Delta,delta_windowed,V,detected_mask"
    )
    row = TraceRecord(
        k=3,
        t=0.1 + 0.2,
        event_kind="fire",
        node=1,
        phases=(0.1, 1.0 / 3.0),
        omegas=(1.0, 1.1),
        delta=0.7 / 3.0,
        delta_windowed=0.1,
        v=0.2,
        detected_mask=2,
    )
    fields = format_trace_row(row).split(",")
    assert fields[2] == "fire"
    assert float(fields[1]) == row.t  # repr floats parse back exactly
    assert float(fields[5]) == row.phases[1]
    assert float(fields[8]) == row.delta
    assert fields[-1] == "2"


def test_write_trace_file(tmp_path):
    path = tmp_path / "trace.csv"
    row = TraceRecord(0, 0.0, "init", -1, (0.0,), (1.0,), 0.0, 0.0, 0.0, 0)
    write_trace(path, 1, [row, row])
    lines = path.read_text().splitlines()
    assert lines[0] == trace_header(1)
    assert len(lines) == 3


# -- RunMetrics, driven with fabricated events --------------------------------


def fresh(phases=(0.0, 0.3), omegas=(1.0, 1.2), mode="warn", window_len=None):
    world = WorldState(
        graph=complete_digraph(2),
        oscillators=[OscillatorState(p, w) for p, w in zip(phases, omegas)],
        normal=frozenset({0, 1}),
        faulty=frozenset(),
    )
    metrics = RunMetrics(world, alpha=0.5, mode=mode, window_len=window_len)
    return world, metrics


def observe(world, metrics, phases=None, omegas=None, advance=0.0):
    if phases is not None:
        for osc, p in zip(world.oscillators, phases):
            osc.phase = p
    if omegas is not None:
        for osc, w in zip(world.oscillators, omegas):
            osc.omega = w
    if advance:
        metrics.advance(advance)
        world.clock += advance
    world.event_count += 1
    return metrics.observe(world, Event(time=world.clock, kind=EventKind.FIRE, node=0))


def test_initial_snapshot():
    world, metrics = fresh()
    assert phase_spread(world) == pytest.approx(0.3)
    assert metrics.hull == (1.0, 1.2)
    assert metrics.spread0 == pytest.approx(0.2)
    first = metrics.rows[0]
    assert (first.k, first.event_kind, first.node) == (0, "init", -1)
    assert first.delta == pytest.approx(0.3)


def test_mode_must_be_known():
    world = fresh()[0]
    with pytest.raises(ValueError):
        RunMetrics(world, alpha=0.5, mode="loud")


def test_wide_arc_is_flagged_in_warn_and_raised_in_strict():
    # Antipodal phases are the two-point worst case: the arc hits exactly 0.5.
    world, metrics = fresh()
    observe(world, metrics, phases=[0.0, 0.5])
    assert any("arc reached" in v for v in metrics.violations)

    world, metrics = fresh(mode="strict")
    with pytest.raises(InvariantViolation, match="arc"):
        observe(world, metrics, phases=[0.0, 0.5])

    world, metrics = fresh(mode="off")
    observe(world, metrics, phases=[0.0, 0.5])
    assert metrics.violations == []


def test_frequency_hull_escape_is_flagged():
    world, metrics = fresh()
    observe(world, metrics, omegas=[1.0, 1.3])
    assert any("hull" in v for v in metrics.violations)


def test_windowed_floor_drop_is_flagged():
    world, metrics = fresh(window_len=4)
    for _ in range(4):
        observe(world, metrics, omegas=[1.1, 1.2])
    assert metrics.violations == []  # floor rose from 1.0 to 1.1, which is fine
    observe(world, metrics, omegas=[1.05, 1.2])
    assert any("floor decreased" in v for v in metrics.violations)


def test_stalled_spread_breaks_the_decay_envelope():
    # alpha 0.5, window 2, two normals: period 4, after which the 0.2
    # spread must have contracted at least once.
    world, metrics = fresh(window_len=2)
    for _ in range(3):
        observe(world, metrics)
    assert metrics.violations == []
    observe(world, metrics)
    assert any("envelope" in v for v in metrics.violations)


def test_virtual_checks_stop_once_the_arc_passes_half():
    world, metrics = fresh()
    # Pack plus virtual node fits well inside a half circle: checked, clean.
    observe(world, metrics, phases=[0.3, 0.4], advance=0.3)
    assert metrics.virtual_in_range and metrics.violations == []
    # Pack pulls half a turn ahead of the reference (virtual node sits at
    # 0.3, so the covering arc spans 0.52): checks latch off without firing.
    observe(world, metrics, phases=[0.78, 0.82])
    assert not metrics.virtual_in_range
    assert metrics.violations == []
    # Still off even though this arrangement would fail the tail property.
    observe(world, metrics, phases=[0.9, 0.2])
    assert metrics.violations == []


def test_virtual_tail_violation_is_flagged_while_in_range():
    world, metrics = fresh()
    observe(world, metrics, phases=[0.9, 0.1])  # virtual sits inside the pack
    assert any("tail" in v for v in metrics.violations)


def test_detection_events_record_first_sightings():
    world, metrics = fresh()
    world.oscillators[1].detected = True
    world.clock = 2.5
    observe(world, metrics)
    observe(world, metrics)
    assert metrics.detection_events == [(1, 2.5, 1)]


def test_convergence_needs_a_full_quiet_window():
    world, metrics = fresh(window_len=3)
    observe(world, metrics, phases=[0.2, 0.2], omegas=[1.0, 1.0])
    observe(world, metrics)
    assert not metrics.converged
    observe(world, metrics)
    assert metrics.converged


def test_violation_recording_is_capped():
    world, metrics = fresh()
    for _ in range(230):
        observe(world, metrics, phases=[0.0, 0.6])
    assert len(metrics.violations) == 200
    assert metrics.suppressed_violations() > 0


def test_clean_reference_run(tmp_path):
    config = load_scenario(REPO / "scenarios" / "nominal_sync.json")
    trace = tmp_path / "run.csv"
    result = run_scenario(config, trace_path=trace)
    assert result.outcome == "converged"
    assert result.metrics.violations == []
    assert result.metrics.hull == (1.0, 1.0)
    assert result.detections == []
    # Every node keeps updating regularly; early transient rounds can
    # stretch a gap past the steady-state 2N events, but not by much.
    assert 0 < result.metrics.measured_window <= 24
    lines = trace.read_text().splitlines()
    assert lines[0] == trace_header(8)
    assert len(lines) == len(result.metrics.rows) + 1
