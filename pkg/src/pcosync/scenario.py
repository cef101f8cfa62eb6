"""Scenario configuration: JSON schema, validation, and world construction.

A scenario pins everything a run needs: topology, protocol variant and its
parameters, initial conditions (explicit or drawn), and attacker scripts.
``validate`` separates hard violations (the run would be meaningless or the
guarantees cannot apply) from informational lines (bound satisfaction,
script stealthiness), so callers can force a run past the former when
deliberately probing outside the guarantee region.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import adversary
from .engine import OscillatorState, WorldState
from .errors import ScenarioValidationError
from .graph import (
    DirectedGraph,
    GraphTooLargeError,
    MAX_EXHAUSTIVE_NODES,
    complete_digraph,
    demo_graph_8,
    directed_ring,
    is_r_robust,
    load_graph,
    parse_graph_text,
)
from .metrics import check_initial_bound
from .msr import ConfiguredAlpha, EqualWeights, WeightPolicy, effective_alpha
from .phase import containing_arc, clockwise_dist

ALGORITHMS = ("absolute", "relative")


@dataclass(frozen=True)
class RandomInterval:
    """Uniform draw on [low, high) with an optional dedicated seed."""

    low: float
    high: float
    seed: int | None = None


@dataclass(frozen=True)
class AttackerSpec:
    node: int
    kind: str
    options: dict[str, Any] = field(default_factory=dict)

    def build(self) -> adversary.AttackScript:
        opts = self.options
        if self.kind == "silent":
            return adversary.silent_script(self.node)
        if self.kind == "stealthy":
            return adversary.stealthy_script(
                self.node,
                period_offsets=opts.get("offsets", (0.0,)),
                claim=opts.get("claim", "one_plus_abs_sin"),
                period=opts.get("period", 1.0),
                start_offsets=opts.get("start_offsets", ()),
            )
        if self.kind == "flooding":
            return adversary.flooding_script(
                self.node,
                burst_count=opts["burst_count"],
                burst_interval=opts.get("burst_interval", 0.02),
                start_time=opts.get("start_time", 1.0),
                claim=opts.get("claim", 1.0),
            )
        if self.kind == "custom":
            return adversary.custom_script(
                self.node,
                pulses=[(float(t), float(v)) for t, v in opts.get("pulses", ())],
                start_pulses=opts.get("start_pulses", ()),
            )
        raise ValueError(f"unknown attacker kind {self.kind!r}")


@dataclass
class ScenarioConfig:
    graph: DirectedGraph
    algorithm: str = "absolute"
    f: int = 0
    weights: WeightPolicy = EqualWeights()
    zeta: float = 0.1
    phases: list[float] | RandomInterval = field(default_factory=list)
    frequencies: list[float] | RandomInterval = field(default_factory=list)
    attackers: list[AttackerSpec] = field(default_factory=list)
    horizon: float = 60.0
    seed: int = 0
    normalize_phases: bool = True
    normalize_frequencies: bool = True
    window_len: int | None = None
    tol_phase: float = 1e-6
    tol_freq: float = 1e-6
    eager_detection: bool = False
    halt_on_detection: bool = True
    monitor: str = "warn"
    name: str = ""

    # -- construction ----------------------------------------------------

    @property
    def faulty_ids(self) -> frozenset[int]:
        return frozenset(a.node for a in self.attackers)

    @property
    def normal_ids(self) -> tuple[int, ...]:
        bad = self.faulty_ids
        return tuple(i for i in range(self.graph.node_count) if i not in bad)

    def effective_alpha(self) -> float:
        degrees = [self.graph.in_degree(i) for i in self.normal_ids]
        d_max = max(degrees) if degrees else 0
        return effective_alpha(self.weights, d_max)

    def resolve_initials(self) -> tuple[list[float], list[float]]:
        """Materialize phases and frequencies for all nodes, applying the
        requested draws and normalizations. Deterministic given the config."""
        n = self.graph.node_count
        phases = self._resolve(self.phases, n, stream=0)
        freqs = self._resolve(self.frequencies, n, stream=1)
        normal = self.normal_ids
        if self.normalize_phases and normal:
            tail = containing_arc([phases[i] for i in normal]).tail
            phases = [clockwise_dist(p, tail) for p in phases]
        if self.normalize_frequencies and normal:
            low = min(freqs[i] for i in normal)
            freqs = [(w - low) + 1.0 for w in freqs]
        return phases, freqs

    def _resolve(self, spec, n: int, stream: int) -> list[float]:
        if isinstance(spec, RandomInterval):
            seed = spec.seed
            rng = np.random.default_rng(
                [self.seed, stream] if seed is None else seed
            )
            return [float(x) for x in rng.uniform(spec.low, spec.high, size=n)]
        values = [float(x) for x in spec]
        if len(values) != n:
            raise ScenarioValidationError(
                [f"initial value list has length {len(values)}, graph has {n} nodes"]
            )
        return values

    def build(self):
        """Instantiate (world, protocol, scripts) ready for the event loop."""
        from .absolute import AbsoluteProtocol, MsrParams
        from .relative import RelativeParams, RelativeProtocol

        phases, freqs = self.resolve_initials()
        oscillators = [OscillatorState(phase=p, omega=w) for p, w in zip(phases, freqs)]
        world = WorldState(
            graph=self.graph,
            oscillators=oscillators,
            normal=frozenset(self.normal_ids),
            faulty=self.faulty_ids,
            rng_seed=self.seed,
        )
        if self.algorithm == "absolute":
            protocol = AbsoluteProtocol(
                MsrParams(
                    f=self.f,
                    weight_policy=self.weights,
                    eager_detection=self.eager_detection,
                )
            )
        else:
            protocol = RelativeProtocol(
                RelativeParams(
                    f=self.f,
                    zeta=self.zeta,
                    weight_policy=self.weights,
                    eager_detection=self.eager_detection,
                )
            )
        scripts = [a.build() for a in self.attackers]
        return world, protocol, scripts

    # -- validation --------------------------------------------------------

    def validate(self) -> tuple[list[str], list[str]]:
        """Return (violations, info). Violations void the guarantees or make
        the scenario unrunnable; info lines report derived facts."""
        violations: list[str] = []
        info: list[str] = []
        n = self.graph.node_count

        if self.algorithm not in ALGORITHMS:
            violations.append(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.f < 0:
            violations.append(f"trim parameter must be nonnegative, got {self.f}")
        if not 0.0 < self.zeta < 0.5:
            violations.append(f"start-pulse offset must lie in (0, 0.5), got {self.zeta}")
        if self.horizon <= 0.0:
            violations.append(f"horizon must be positive, got {self.horizon}")
        if self.monitor not in ("off", "warn", "strict"):
            violations.append(f"monitor must be off/warn/strict, got {self.monitor!r}")

        seen: set[int] = set()
        for spec in self.attackers:
            if not 0 <= spec.node < n:
                violations.append(f"attacker node {spec.node} outside 0..{n - 1}")
            elif spec.node in seen:
                violations.append(f"attacker node {spec.node} listed twice")
            seen.add(spec.node)
        if violations:
            return violations, info

        normal = self.normal_ids
        if not normal:
            violations.append("every node is an attacker; nothing to synchronize")
            return violations, info

        # Locality: the guarantees assume no normal node hears more than f
        # misbehaving in-neighbors.
        bad = self.faulty_ids
        for i in normal:
            count = sum(1 for j in self.graph.in_neighbors[i] if j in bad)
            if count > self.f:
                violations.append(
                    f"node {i} has {count} misbehaving in-neighbors, more than f={self.f}"
                )

        if isinstance(self.weights, ConfiguredAlpha):
            worst = max((self.graph.in_degree(i) for i in normal), default=0)
            if self.weights.alpha * (worst + 1) > 1.0 + 1e-12:
                violations.append(
                    f"neighbor weight {self.weights.alpha} is infeasible at in-degree {worst}"
                )

        try:
            phases, freqs = self.resolve_initials()
        except ScenarioValidationError as exc:
            violations.extend(exc.violations)
            return violations, info

        for i in normal:
            if not 0.0 <= phases[i] < 1.0:
                violations.append(f"node {i} initial phase {phases[i]} outside [0, 1)")
            if freqs[i] < 1.0 - 1e-12:
                violations.append(f"node {i} initial frequency {freqs[i]} below 1")

        normal_phases = [phases[i] for i in normal]
        normal_freqs = [freqs[i] for i in normal]
        arc0 = containing_arc(normal_phases).length
        spread0 = max(normal_freqs) - min(normal_freqs)
        if arc0 >= 0.5:
            violations.append(
                f"initial containing arc {arc0:.6f} is at least a half circle"
            )
        if abs(min(normal_freqs) - 1.0) > 1e-9:
            violations.append(
                f"slowest normal frequency is {min(normal_freqs)!r}, expected exactly 1"
            )
        if min(normal_phases) > 1e-9:
            info.append(
                f"phases not rotated to put the arc tail at 0 (min is {min(normal_phases)!r})"
            )

        required = 2 * self.f + 1
        try:
            robust = is_r_robust(self.graph, required)
        except GraphTooLargeError:
            info.append(
                f"robustness unchecked: graph exceeds {MAX_EXHAUSTIVE_NODES} nodes"
            )
        else:
            if robust:
                info.append(f"graph is {required}-robust (sufficient for f={self.f})")
            else:
                violations.append(
                    f"graph is not {required}-robust, required for f={self.f}"
                )

        world, _, scripts = self.build()
        for spec, script in zip(self.attackers, scripts):
            tag = "stealthy" if adversary.is_stealthy(script, world, self.horizon) else "NOT stealthy"
            info.append(f"attacker {spec.node} ({spec.kind}) is {tag} over the horizon")

        alpha = self.effective_alpha()
        r = len(normal)
        info.append(
            f"initial arc {arc0!r}, frequency spread {spread0!r}, weight floor {alpha!r}"
        )
        for variant in ("strict", "relaxed", "relative"):
            ok, lhs, rhs = check_initial_bound(
                variant,
                arc0=arc0,
                spread0=spread0,
                node_count=n,
                normal_count=r,
                alpha=alpha,
                window_len=self.window_len,
                zeta=self.zeta,
            )
            verdict = "satisfied" if ok else "not satisfied"
            lhs_txt = "inf" if math.isinf(lhs) else f"{lhs:.6g}"
            info.append(f"{variant} admissibility bound {verdict} (lhs {lhs_txt}, rhs {rhs:.6g})")
        return violations, info

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        weights: dict[str, Any] = {"policy": "equal"}
        if isinstance(self.weights, ConfiguredAlpha):
            weights = {"policy": "alpha", "alpha": self.weights.alpha}
        initials = {}
        for key, spec in (("phases", self.phases), ("frequencies", self.frequencies)):
            if isinstance(spec, RandomInterval):
                rand: dict[str, Any] = {"low": spec.low, "high": spec.high}
                if spec.seed is not None:
                    rand["seed"] = spec.seed
                initials[key] = {"random": rand}
            else:
                initials[key] = list(spec)
        return {
            "name": self.name,
            "algorithm": self.algorithm,
            "graph": {"inline": [list(row) for row in self.graph.in_neighbors]},
            "f": self.f,
            "weights": weights,
            "zeta": self.zeta,
            **initials,
            "attackers": [
                {"node": a.node, "type": a.kind, **a.options} for a in self.attackers
            ],
            "horizon": self.horizon,
            "seed": self.seed,
            "normalize_phases": self.normalize_phases,
            "normalize_frequencies": self.normalize_frequencies,
            "window_len": self.window_len,
            "tol_phase": self.tol_phase,
            "tol_freq": self.tol_freq,
            "eager_detection": self.eager_detection,
            "halt_on_detection": self.halt_on_detection,
            "monitor": self.monitor,
        }


def _parse_graph(spec: Any, base_dir: Path | None) -> DirectedGraph:
    if isinstance(spec, dict):
        if "file" in spec:
            path = Path(spec["file"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            return load_graph(path)
        if "inline" in spec:
            return DirectedGraph.from_lists(spec["inline"])
        if "text" in spec:
            return parse_graph_text(spec["text"])
        if "named" in spec:
            name = spec["named"]
            if name == "demo8":
                return demo_graph_8()
            if name == "complete":
                return complete_digraph(int(spec["n"]))
            if name == "ring":
                return directed_ring(int(spec["n"]))
            raise ValueError(f"unknown named graph {name!r}")
    raise ValueError(
        "graph must be an object with one of the keys 'file', 'inline', 'text', 'named'"
    )


def _parse_initials(spec: Any, what: str) -> list[float] | RandomInterval:
    if isinstance(spec, dict):
        if "random" not in spec:
            raise ValueError(f"{what} object form must be {{'random': {{...}}}}")
        rand = spec["random"]
        return RandomInterval(
            low=float(rand["low"]),
            high=float(rand["high"]),
            seed=rand.get("seed"),
        )
    return [float(x) for x in spec]


def _parse_weights(spec: Any) -> WeightPolicy:
    if spec is None:
        return EqualWeights()
    policy = spec.get("policy", "equal")
    if policy == "equal":
        return EqualWeights()
    if policy == "alpha":
        return ConfiguredAlpha(alpha=float(spec["alpha"]))
    raise ValueError(f"unknown weight policy {policy!r}")


def scenario_from_dict(data: dict[str, Any], base_dir: Path | None = None) -> ScenarioConfig:
    """Build a config from parsed JSON. ``base_dir`` anchors relative graph
    file paths, normally the directory containing the scenario file."""
    known = {
        "name", "algorithm", "graph", "f", "weights", "zeta", "phases",
        "frequencies", "attackers", "horizon", "seed", "normalize_phases",
        "normalize_frequencies", "window_len", "tol_phase", "tol_freq",
        "eager_detection", "halt_on_detection", "monitor",
    }
    unknown = set(data) - known
    if unknown:
        raise ScenarioValidationError(
            [f"unknown scenario key {k!r}" for k in sorted(unknown)]
        )
    attackers = []
    for item in data.get("attackers", []):
        opts = {k: v for k, v in item.items() if k not in ("node", "type")}
        attackers.append(AttackerSpec(node=int(item["node"]), kind=item["type"], options=opts))
    return ScenarioConfig(
        graph=_parse_graph(data["graph"], base_dir),
        name=data.get("name", ""),
        algorithm=data.get("algorithm", "absolute"),
        f=int(data.get("f", 0)),
        weights=_parse_weights(data.get("weights")),
        zeta=float(data.get("zeta", 0.1)),
        phases=_parse_initials(data.get("phases", []), "phases"),
        frequencies=_parse_initials(data.get("frequencies", []), "frequencies"),
        attackers=attackers,
        horizon=float(data.get("horizon", 60.0)),
        seed=int(data.get("seed", 0)),
        normalize_phases=bool(data.get("normalize_phases", True)),
        normalize_frequencies=bool(data.get("normalize_frequencies", True)),
        window_len=data.get("window_len"),
        tol_phase=float(data.get("tol_phase", 1e-6)),
        tol_freq=float(data.get("tol_freq", 1e-6)),
        eager_detection=bool(data.get("eager_detection", False)),
        halt_on_detection=bool(data.get("halt_on_detection", True)),
        monitor=data.get("monitor", "warn"),
    )


def load_scenario(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    with path.open() as handle:
        data = json.load(handle)
    config = scenario_from_dict(data, base_dir=path.parent)
    if not config.name:
        config.name = path.stem
    return config
