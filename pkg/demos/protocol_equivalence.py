#!/usr/bin/env python3
"""Absolute versus relative frequency coupling on one attack-free network.

The absolute protocol trusts the frequency value stamped on each pulse.
The relative protocol never reads it: each sender marks the start of its
pulse a fixed fraction of a cycle early, the receiver clocks that gap with
its own oscillator, and the ratio recovers the sender's rate.  Attack-free,
the two must land on the same frequencies to within numerical noise.
"""

import argparse
import dataclasses

from pcosync import RandomInterval, ScenarioConfig, complete_digraph, run_scenario


def per_node_updates(result):
    out = {i: [] for i in range(result.config.graph.node_count)}
    for row in result.metrics.rows:
        if row.event_kind == "update":
            out[row.node].append(row.omegas[row.node])
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    config = ScenarioConfig(
        graph=complete_digraph(5),
        algorithm="absolute",
        f=1,
        zeta=0.1,
        phases=RandomInterval(0.0, 0.18),
        frequencies=RandomInterval(1.0, 1.05),
        seed=args.seed,
        horizon=40.0,
    )
    absolute = run_scenario(config, collect_trace=True)
    relative = run_scenario(
        dataclasses.replace(config, algorithm="relative"),
        collect_trace=True,
        collect_ratios=True,
    )
    print(f"absolute: {absolute.outcome} at t = {absolute.world.clock:.2f}")
    print(f"relative: {relative.outcome} at t = {relative.world.clock:.2f}")
    print()

    upd_abs = per_node_updates(absolute)
    upd_rel = per_node_updates(relative)
    worst = 0.0
    print("first updates, absolute vs relative:")
    for i in range(5):
        pairs = list(zip(upd_abs[i], upd_rel[i]))
        worst = max(worst, max(abs(a - b) for a, b in pairs))
        shown = "  ".join(f"{a:.9f}|{b:.9f}" for a, b in pairs[:3])
        print(f"  node {i}: {shown}")
    print(f"largest per-update difference over the whole run: {worst:.2e}")

    gaps = [abs(ratio * before - sender)
            for _, _, _, ratio, before, sender in relative.ratio_log
            if sender is not None]
    print(f"ratio identity |ratio * own - sender| worst case: {max(gaps):.2e}"
          f" over {len(gaps)} measurements")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
