"""Geometry on the unit phase circle.

Phases live in [0, 1) and advance clockwise, meaning in the direction of
increasing value with wrap-around at 1. All helpers here are pure functions;
the event engine owns every mutation of oscillator state.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence


def clockwise_dist(a: float, b: float) -> float:
    """Clockwise distance from ``b`` forward to ``a`` on the unit circle.

    Equals ``a - b`` when ``a >= b`` and ``1 - b + a`` otherwise, so the
    result is always in [0, 1). ``clockwise_dist(x, x) == 0`` and for
    distinct points the two directed distances sum to exactly 1.
    """
    if a >= b:
        return a - b
    return 1.0 - b + a


class Arc(NamedTuple):
    """A closed arc of the circle, running clockwise from tail to head."""

    length: float
    tail: float
    head: float


def containing_arc(phases: Sequence[float]) -> Arc:
    """Shortest arc that contains every given phase.

    The arc is the complement of the largest gap between circularly
    consecutive phases; ties in the largest gap are broken toward the
    smallest tail phase. A single phase (or several equal ones) yields a
    zero-length arc with tail == head.

    Args:
        phases: nonempty sequence of values in [0, 1).

    Returns:
        Arc(length, tail, head) with length = clockwise_dist(head, tail).
    """
    if len(phases) == 0:
        raise ValueError("containing_arc needs at least one phase")
    pts = sorted(phases)
    n = len(pts)
    # Gap i runs clockwise from pts[i] to the next point; the arc covering
    # everything else has tail = next point and head = pts[i].
    best_gap = -1.0
    best = Arc(0.0, pts[0], pts[0])
    for i in range(n):
        if i + 1 < n:
            gap = pts[i + 1] - pts[i]
            tail = pts[i + 1]
        else:
            gap = 1.0 - pts[-1] + pts[0]
            tail = pts[0]
        if gap > best_gap or (gap == best_gap and tail < best.tail):
            best_gap = gap
            best = Arc(1.0 - gap, tail, pts[i])
    return best


def time_to_phase(phase: float, omega: float, target: float) -> float:
    """Time for an oscillator at ``phase`` running at rate ``omega`` to
    reach ``target``, taking the target as strictly ahead.

    A target at or behind the current phase is reached on the next lap.
    """
    if omega <= 0.0:
        raise ValueError(f"frequency must be positive, got {omega}")
    if target > phase:
        return (target - phase) / omega
    return (1.0 - phase + target) / omega
