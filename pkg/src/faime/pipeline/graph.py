"""Stage graphs: typed stages, edges, parameter bindings, validation.

A device is a DAG of stages, each tagged with a layer kind. Edges may
only point from a lower (or equal) layer index to a higher one, so
events never flow back toward capture. Parameter bindings declare where
each production parameter gets its value -- a stimulus channel or a
learning stage -- which makes claims like "gestures cannot affect pitch"
checkable by inspecting the graph instead of by reading stage code.

validate_graph returns every violation as data; an empty list means the
graph is well formed.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Mapping

from .events import Event, Stimulus


class StageKind(IntEnum):
    """Pipeline layers, ordered from user input to user output."""

    STIMULUS_CAPTURE = 0
    STIMULUS_ADAPTATION = 1
    LEARNING = 2
    MUSIC_ADAPTATION = 3
    PRODUCTION = 4
    FEEDBACK = 5


class StageBehavior:
    """Per-stage processing logic. Subclasses override what they need.

    Behaviors may hold internal state; reset() must restore the
    just-constructed state so a scheduler rerun is bit-identical.
    on_event must be a pure function of (behavior state, event): no
    clocks, no randomness, no I/O that feeds back into outputs.
    """

    def reset(self) -> None:
        pass

    def on_event(self, event: Event, ctx) -> None:
        raise NotImplementedError

    def advance(self, now_us: int, ctx) -> None:
        """Commit time-deferred output due strictly before now_us."""

    def flush(self, ctx) -> None:
        """Commit any remaining deferred output at end of stream."""


@dataclass(frozen=True)
class Stage:
    """A node in the device graph.

    `consumes` lists the event types this stage handles; `channels`
    optionally restricts Stimulus events to named channels (empty set =
    any channel).
    """

    stage_id: str
    kind: StageKind
    behavior: StageBehavior
    consumes: frozenset[type] = frozenset()
    channels: frozenset[str] = frozenset()

    def accepts(self, event: Event) -> bool:
        if type(event) not in self.consumes:
            return False
        if isinstance(event, Stimulus) and self.channels and event.channel not in self.channels:
            return False
        return True


@dataclass(frozen=True, slots=True)
class StimulusChannel:
    """Binding source: the latest value of a named capture channel."""

    channel: str


@dataclass(frozen=True, slots=True)
class LearningOutput:
    """Binding source: the output of a learning stage."""

    stage_id: str


BindingSource = StimulusChannel | LearningOutput


@dataclass(frozen=True, slots=True)
class Binding:
    """Declares the single source feeding one production parameter."""

    parameter: str
    source: BindingSource


@dataclass(frozen=True)
class DeviceGraph:
    stages: Mapping[str, Stage]
    edges: frozenset[tuple[str, str]]
    bindings: tuple[Binding, ...] = ()


def device_graph(
    stages: Iterable[Stage],
    edges: Iterable[tuple[str, str]],
    bindings: Iterable[Binding] = (),
) -> DeviceGraph:
    """Assemble a DeviceGraph, keying stages by id."""
    by_id: dict[str, Stage] = {}
    for stage in stages:
        if stage.stage_id in by_id:
            raise ValueError(f"duplicate stage id {stage.stage_id!r}")
        by_id[stage.stage_id] = stage
    return DeviceGraph(stages=by_id, edges=frozenset(edges), bindings=tuple(bindings))


@dataclass(frozen=True, slots=True)
class Violation:
    """One graph defect. `code` is stable; `subject` identifies the spot."""

    code: str
    subject: tuple = ()

    def __str__(self) -> str:
        return f"{self.code}{list(self.subject)}" if self.subject else self.code


def _nodes_on_cycles(node_ids: Iterable[str], edges: Iterable[tuple[str, str]]) -> set[str]:
    """Nodes lying on at least one directed cycle (Tarjan SCC, iterative).

    A node is on a cycle iff its strongly connected component has more
    than one member, or it carries a self-loop.
    """
    nodes = list(node_ids)
    pos = {n: i for i, n in enumerate(nodes)}
    succ: list[list[int]] = [[] for _ in nodes]
    result: set[str] = set()
    for u, v in edges:
        ui = pos.get(u)
        vi = pos.get(v)
        if ui is None or vi is None:
            continue
        if ui == vi:
            result.add(u)
        else:
            succ[ui].append(vi)

    n = len(nodes)
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    counter = 0

    for root in range(n):
        if index[root] >= 0:
            continue
        # work frames: (node, position of the next successor to visit)
        work = [(root, 0)]
        while work:
            node, child_pos = work.pop()
            if child_pos == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            children = succ[node]
            descended = False
            while child_pos < len(children):
                child = children[child_pos]
                child_pos += 1
                if index[child] < 0:
                    work.append((node, child_pos))
                    work.append((child, 0))
                    descended = True
                    break
                if on_stack[child]:
                    if index[child] < lowlink[node]:
                        lowlink[node] = index[child]
            if descended:
                continue
            if work:
                parent = work[-1][0]
                if lowlink[node] < lowlink[parent]:
                    lowlink[parent] = lowlink[node]
            if lowlink[node] == index[node]:
                component_size = 0
                while True:
                    member = stack.pop()
                    on_stack[member] = False
                    component_size += 1
                    if member == node:
                        break
                    result.add(nodes[member])
                if component_size > 1:
                    result.add(nodes[node])
    return result


def validate_graph(graph: DeviceGraph) -> list[Violation]:
    """Collect every structural violation; an empty list means valid.

    Checks: edges reference known stages; edges never point from a
    higher layer to a lower one; the graph is acyclic; at least one
    Production stage exists; each binding parameter is bound once and
    references an existing learning stage or consumed stimulus channel.
    """
    violations: list[Violation] = []
    stages = graph.stages

    for u, v in sorted(graph.edges):
        missing = [s for s in dict.fromkeys((u, v)) if s not in stages]
        for m in missing:
            violations.append(Violation("unknown-stage", (u, v, m)))
        if not missing and stages[u].kind > stages[v].kind:
            violations.append(Violation("backward-edge", (u, v)))

    if not any(s.kind is StageKind.PRODUCTION for s in stages.values()):
        violations.append(Violation("no-production"))

    on_cycles = _nodes_on_cycles(stages.keys(), graph.edges)
    if on_cycles:
        violations.append(Violation("cycle", tuple(sorted(on_cycles))))

    seen_params: dict[str, int] = {}
    for b in graph.bindings:
        seen_params[b.parameter] = seen_params.get(b.parameter, 0) + 1
    for param in sorted(p for p, n in seen_params.items() if n > 1):
        violations.append(Violation("duplicate-binding", (param,)))

    for b in graph.bindings:
        if isinstance(b.source, LearningOutput):
            if b.source.stage_id not in stages:
                violations.append(Violation("unknown-binding-stage", (b.parameter, b.source.stage_id)))
            elif stages[b.source.stage_id].kind is not StageKind.LEARNING:
                violations.append(Violation("binding-not-learning", (b.parameter, b.source.stage_id)))
        else:
            ch = b.source.channel
            consumed = any(
                Stimulus in s.consumes and (not s.channels or ch in s.channels) for s in stages.values()
            )
            if not consumed:
                violations.append(Violation("unknown-binding-channel", (b.parameter, ch)))

    return violations


def topological_order(graph: DeviceGraph) -> list[str]:
    """Stage ids in topological order, lexicographic among ready stages."""
    indegree = {sid: 0 for sid in graph.stages}
    succ: dict[str, list[str]] = {sid: [] for sid in graph.stages}
    for u, v in graph.edges:
        succ[u].append(v)
        indegree[v] += 1
    ready = [sid for sid, n in indegree.items() if n == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        sid = heapq.heappop(ready)
        order.append(sid)
        for nxt in succ[sid]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) != len(graph.stages):
        raise ValueError("graph contains a cycle; validate_graph first")
    return order


def stimulus_bound_parameters(graph: DeviceGraph) -> frozenset[str]:
    """Parameters whose sole source is a stimulus channel.

    The learning layer cannot influence these by construction, which is
    the graph-level statement of pitch/volume independence.
    """
    return frozenset(b.parameter for b in graph.bindings if isinstance(b.source, StimulusChannel))


__all__ = [
    "StageKind",
    "StageBehavior",
    "Stage",
    "StimulusChannel",
    "LearningOutput",
    "BindingSource",
    "Binding",
    "DeviceGraph",
    "device_graph",
    "Violation",
    "validate_graph",
    "topological_order",
    "stimulus_bound_parameters",
]
