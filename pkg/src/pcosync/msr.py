"""Trimming and weight construction shared by both update rules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import ProtocolFault


@dataclass(frozen=True)
class EqualWeights:
    """Every participant (self plus each kept neighbor value) weighs the same."""


@dataclass(frozen=True)
class ConfiguredAlpha:
    """Each kept neighbor value weighs exactly ``alpha``; self takes the rest.

    ``alpha`` doubles as the guaranteed lower bound on every weight, so the
    construction fails when alpha * (j_count + 1) exceeds 1.
    """

    alpha: float


WeightPolicy = EqualWeights | ConfiguredAlpha


def make_weights(policy: WeightPolicy, j_count: int) -> tuple[float, ...]:
    """Weight vector (self weight first, then one per kept neighbor value).

    All weights are positive, at least the policy's floor, and sum to 1
    within floating-point roundoff.
    """
    if j_count < 0:
        raise ValueError(f"j_count must be nonnegative, got {j_count}")
    if isinstance(policy, EqualWeights):
        w = 1.0 / (j_count + 1)
        return (w,) * (j_count + 1)
    alpha = policy.alpha
    if alpha <= 0.0:
        raise ValueError(f"weight floor must be positive, got {alpha}")
    if alpha * (j_count + 1) > 1.0 + 1e-12:
        raise ValueError(
            f"alpha={alpha} cannot give {j_count + 1} weights each >= alpha summing to 1"
        )
    return (1.0 - j_count * alpha,) + (alpha,) * j_count


def effective_alpha(policy: WeightPolicy, d_max: int) -> float:
    """Smallest weight the policy can produce given maximum in-degree d_max.

    This is the contraction constant the analytic bounds are stated in.
    """
    if isinstance(policy, EqualWeights):
        return 1.0 / (d_max + 1)
    return policy.alpha


def msr_trim(values: Sequence[float], trim_count: int) -> list[float]:
    """Sort and drop the ``trim_count`` largest and smallest values.

    Args:
        values: multiset of reals.
        trim_count: number to remove from each end, at least 0.

    Returns:
        The surviving values in ascending order (may be empty when
        ``len(values) == 2 * trim_count``).

    Raises:
        ProtocolFault: fewer than ``2 * trim_count`` values to trim.
    """
    if trim_count < 0:
        raise ValueError(f"trim count must be nonnegative, got {trim_count}")
    if len(values) < 2 * trim_count:
        raise ProtocolFault(
            f"cannot trim {trim_count} from each end of {len(values)} values"
        )
    ordered = sorted(values)
    if trim_count == 0:
        return ordered
    return ordered[trim_count : len(ordered) - trim_count]
