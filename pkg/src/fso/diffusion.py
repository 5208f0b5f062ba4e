"""Agent-based knowledge diffusion over organization topologies.

A meta-network couples agents, knowledge units and tasks; the agent-agent
layer carries diffusion.  Every simulation step is a synchronous round:
each live edge, in canonical sorted order, gives each direction an
independent chance ``p`` to transmit one uniformly chosen unit the sender
knows and the receiver lacks.  Transmissions are computed against the
pre-step state and applied together, so knowledge only ever grows.

Isolation events cut all of an agent's edges while its knowledge is kept,
which is how organizational disruption is modeled.  Two topologies are
built in: a balanced hierarchy (a tree, so any internal node is a cut
vertex) and a ring of clique cells joined by doubled bridges (biconnected,
so no single isolation disconnects the remaining agents).

Runs are fully deterministic for a given spec: the RNG stream is consumed
in a documented order (isolation draws first at their step, then edge
draws in canonical order, direction low-to-high then high-to-low; a unit
draw happens only when a transmission fires and candidates exist).
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import dataclass, field, replace
from enum import Enum


class InvalidParams(ValueError):
    """Topology or scenario parameters out of range."""


class NoAgentsLeft(RuntimeError):
    """Every agent is already isolated."""


class IsolationStrategy(Enum):
    RANDOM = "random"
    MAX_DEGREE = "max_degree"

    @classmethod
    def parse(cls, name: str) -> "IsolationStrategy":
        key = name.strip().lower().replace("-", "").replace("_", "")
        for strategy in cls:
            if strategy.value.replace("_", "") == key:
                return strategy
        raise InvalidParams(f"unknown isolation strategy {name!r}")


class Topology(Enum):
    FRACTAL = "fractal"
    HIERARCHY = "hierarchy"

    @classmethod
    def parse(cls, name: str) -> "Topology":
        key = name.strip().lower()
        for topology in cls:
            if topology.value == key:
                return topology
        raise InvalidParams(f"unknown topology {name!r}")


# --- topologies ---------------------------------------------------------


def gen_hierarchy(n: int, branching: int = 2) -> frozenset[tuple[int, int]]:
    """Balanced rooted tree over agents 0..n-1 in level order."""
    if n < 1:
        raise InvalidParams("need at least one agent")
    if branching < 2:
        raise InvalidParams("branching must be at least 2")
    return frozenset((((i - 1) // branching), i) for i in range(1, n))


def gen_fractal(n: int, cell_size: int = 3) -> frozenset[tuple[int, int]]:
    """Ring of clique cells with two vertex-disjoint bridges per adjacency.

    The doubled bridges make the graph biconnected: removing any single
    agent leaves the rest connected.
    """
    if cell_size < 3:
        raise InvalidParams("cell_size must be at least 3")
    if n < 1 or n % cell_size != 0:
        raise InvalidParams(f"agent count {n} is not divisible by cell size {cell_size}")
    cells = n // cell_size
    edges: set[tuple[int, int]] = set()
    for c in range(cells):
        base = c * cell_size
        for i in range(cell_size):
            for j in range(i + 1, cell_size):
                edges.add((base + i, base + j))
    if cells > 1:
        for c in range(cells):
            here = c * cell_size
            there = ((c + 1) % cells) * cell_size
            for a, b in ((here + cell_size - 2, there), (here + cell_size - 1, there + 1)):
                edges.add((min(a, b), max(a, b)))
    return frozenset(edges)


# --- meta-network -------------------------------------------------------


@dataclass
class MetaNetwork:
    """Agents x knowledge x tasks, with the agent layer carrying edges."""

    agents: tuple[int, ...]
    knowledge: tuple[int, ...]
    tasks: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    knows: dict[int, set[int]]
    assignment: dict[int, int]
    isolated: set[int] = field(default_factory=set)

    @classmethod
    def initial(cls, edges: frozenset[tuple[int, int]], n: int) -> "MetaNetwork":
        """Fresh state: agent i knows exactly unit i and performs task i."""
        return cls(
            agents=tuple(range(n)),
            knowledge=tuple(range(n)),
            tasks=tuple(range(n)),
            edges=edges,
            knows={i: {i} for i in range(n)},
            assignment={i: i for i in range(n)},
        )

    def live_edges(self) -> list[tuple[int, int]]:
        return [
            (u, v)
            for u, v in sorted(self.edges)
            if u not in self.isolated and v not in self.isolated
        ]

    def live_degree(self, agent: int) -> int:
        if agent in self.isolated:
            return 0
        return sum(
            1
            for u, v in self.edges
            if (u == agent and v not in self.isolated)
            or (v == agent and u not in self.isolated)
        )


def diffusion_measure(net: MetaNetwork) -> float:
    """Fraction of (agent, unit) pairs where the agent knows the unit."""
    total = sum(len(units) for units in net.knows.values())
    return total / (len(net.agents) * len(net.knowledge))


def step(net: MetaNetwork, rng: random.Random, p: float) -> MetaNetwork:
    """One synchronous exchange round; mutates and returns the network."""
    additions: dict[int, set[int]] = {}
    for u, v in net.live_edges():
        for sender, receiver in ((u, v), (v, u)):
            if rng.random() >= p:
                continue
            candidates = sorted(net.knows[sender] - net.knows[receiver])
            if not candidates:
                continue
            unit = candidates[rng.randrange(len(candidates))]
            additions.setdefault(receiver, set()).add(unit)
    for receiver, units in additions.items():
        net.knows[receiver] |= units
    return net


def isolate(
    net: MetaNetwork, strategy: IsolationStrategy, rng: random.Random
) -> tuple[MetaNetwork, int]:
    """Cut one agent's edges; its knowledge is retained."""
    candidates = [a for a in net.agents if a not in net.isolated]
    if not candidates:
        raise NoAgentsLeft("all agents are already isolated")
    if strategy is IsolationStrategy.RANDOM:
        agent = candidates[rng.randrange(len(candidates))]
    else:
        agent = min(candidates, key=lambda a: (-net.live_degree(a), a))
    net.isolated.add(agent)
    return net, agent


# --- scenarios ----------------------------------------------------------

SINGLE_ISOLATION_TIMES = (10,)
REPEATED_ISOLATION_TIMES = (10, 20, 40, 70, 120)

DEFAULT_TRANSMIT_PROBABILITY = 0.5
DEFAULT_HORIZON = 150


@dataclass(frozen=True)
class ScenarioSpec:
    """Everything needed to reproduce one simulation run."""

    topology: Topology
    horizon: int = DEFAULT_HORIZON
    transmit_probability: float = DEFAULT_TRANSMIT_PROBABILITY
    isolation_events: tuple[tuple[int, IsolationStrategy], ...] = ()
    seed: int = 0
    agents: int = 15
    cell_size: int = 3
    branching: int = 2

    def __post_init__(self):
        if not 0 < self.transmit_probability <= 1:
            raise InvalidParams("transmit_probability must be in (0, 1]")
        if self.horizon < 0:
            raise InvalidParams("horizon must be non-negative")
        for time, _ in self.isolation_events:
            if not 1 <= time <= self.horizon:
                raise InvalidParams(
                    f"isolation time {time} outside 1..{self.horizon}"
                )

    def build_edges(self) -> frozenset[tuple[int, int]]:
        if self.topology is Topology.FRACTAL:
            return gen_fractal(self.agents, self.cell_size)
        return gen_hierarchy(self.agents, self.branching)


@dataclass(frozen=True)
class DiffusionTrace:
    """Diffusion value per step (index 0 is the initial state)."""

    values: tuple[float, ...]
    isolations: tuple[tuple[int, int], ...] = ()  # (step, agent)

    @property
    def final(self) -> float:
        return self.values[-1]


def run_scenario(spec: ScenarioSpec) -> DiffusionTrace:
    """Run one scenario to the horizon, deterministically for its seed."""
    net = MetaNetwork.initial(spec.build_edges(), spec.agents)
    rng = random.Random(spec.seed)
    values = [diffusion_measure(net)]
    isolations: list[tuple[int, int]] = []
    for t in range(1, spec.horizon + 1):
        for time, strategy in spec.isolation_events:
            if time == t:
                net, agent = isolate(net, strategy, rng)
                isolations.append((t, agent))
        step(net, rng, spec.transmit_probability)
        values.append(diffusion_measure(net))
    return DiffusionTrace(tuple(values), tuple(isolations))


@dataclass(frozen=True)
class MonteCarloResult:
    """Replicated runs of one spec plus their per-step aggregates."""

    spec: ScenarioSpec
    traces: tuple[DiffusionTrace, ...]
    mean: tuple[float, ...]
    min: tuple[float, ...]
    max: tuple[float, ...]

    @property
    def final_mean(self) -> float:
        return self.mean[-1]


def monte_carlo(spec: ScenarioSpec, replicates: int) -> MonteCarloResult:
    """Run ``replicates`` independent runs; replicate r uses seed+r."""
    if replicates < 1:
        raise InvalidParams("replicates must be at least 1")
    traces = tuple(
        run_scenario(replace(spec, seed=spec.seed + r)) for r in range(replicates)
    )
    steps = len(traces[0].values)
    mean = tuple(
        sum(trace.values[t] for trace in traces) / replicates for t in range(steps)
    )
    low = tuple(min(trace.values[t] for trace in traces) for t in range(steps))
    high = tuple(max(trace.values[t] for trace in traces) for t in range(steps))
    return MonteCarloResult(spec, traces, mean, low, high)


# --- spec and trace I/O --------------------------------------------------

_SCENARIO_KEYS = {
    "topology",
    "horizon",
    "transmit_probability",
    "isolation_events",
    "seed",
    "agents",
    "cell_size",
    "branching",
}


def scenario_from_dict(data: dict) -> ScenarioSpec:
    unknown = set(data) - _SCENARIO_KEYS
    if unknown:
        raise InvalidParams(f"unknown scenario keys: {sorted(unknown)}")
    if "topology" not in data:
        raise InvalidParams("scenario must name a topology")
    events = tuple(
        (int(time), IsolationStrategy.parse(strategy))
        for time, strategy in data.get("isolation_events", [])
    )
    kwargs = {
        key: data[key]
        for key in ("horizon", "transmit_probability", "seed", "agents",
                    "cell_size", "branching")
        if key in data
    }
    return ScenarioSpec(
        topology=Topology.parse(data["topology"]),
        isolation_events=events,
        **kwargs,
    )


def load_scenario(path) -> ScenarioSpec:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def write_trace_csv(trace: DiffusionTrace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "diffusion"])
        for t, value in enumerate(trace.values):
            writer.writerow([t, value])


def write_aggregate_csv(result: MonteCarloResult, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "mean", "min", "max"])
        for t in range(len(result.mean)):
            writer.writerow([t, result.mean[t], result.min[t], result.max[t]])


def write_replicates_csv(result: MonteCarloResult, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["replicate", "step", "diffusion"])
        for r, trace in enumerate(result.traces):
            for t, value in enumerate(trace.values):
                writer.writerow([r, t, value])
