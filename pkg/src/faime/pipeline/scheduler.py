"""Deterministic event scheduler over a validated stage graph.

Time is whatever the ingested events say it is: the scheduler never
reads a clock, so replaying a stream is bit-for-bit reproducible. Events
are processed in (t_us, seq) order, delivered to root stages that accept
them, and cascade along graph edges in topological order (lexicographic
stage id as the tie-break).

Stages hand results onward in two ways:

* ctx.forward(event) -- internal flow to downstream stages only;
* ctx.emit(event)    -- stamped with a fresh seq, routed downstream AND
                        returned to the caller as observable output.

Production stages defer their emissions through a ThrottleGate: requests
within the per-address rate window coalesce (keep latest) and commit at
the window boundary, evaluated purely in event time. Deferred output
becomes observable on the first call that moves time past its slot
(step/advance_time) or at flush().
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable

from .events import Control, Event, Stimulus
from .graph import DeviceGraph, Stage, Violation, topological_order, validate_graph


class InvalidGraph(Exception):
    """The graph failed validation; `violations` lists every defect."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


class UnsortedStream(Exception):
    """An ingested event's timestamp went backward."""


class StagePanic(Exception):
    """A stage behavior raised; `stage_id` names the culprit."""

    def __init__(self, stage_id: str, cause: BaseException):
        self.stage_id = stage_id
        super().__init__(f"stage {stage_id!r} panicked: {cause!r}")
        self.__cause__ = cause


@dataclass(frozen=True, slots=True)
class Throttle:
    """Per-address output rate limit with keep-latest coalescing."""

    rate_hz: float = 100.0

    def __post_init__(self):
        if not (self.rate_hz > 0):
            raise ValueError(f"throttle rate must be positive, got {self.rate_hz}")

    @property
    def interval_us(self) -> int:
        return math.ceil(1_000_000 / self.rate_hz)


class ThrottleGate:
    """Event-time rate limiter state for one output address.

    request(t) marks output wanted at time t, superseding any earlier
    un-committed request. due(now) commits the request once its emission
    slot (max of request time and one interval after the previous
    emission) lies strictly before `now`; flush() commits it
    unconditionally. Commit returns the emission timestamp.
    """

    def __init__(self, throttle: Throttle):
        self._interval = throttle.interval_us
        self._last_emit: int | None = None
        self._pending: int | None = None

    def reset(self) -> None:
        self._last_emit = None
        self._pending = None

    def request(self, t_us: int) -> None:
        self._pending = t_us

    def _slot(self) -> int | None:
        if self._pending is None:
            return None
        if self._last_emit is None:
            return self._pending
        return max(self._pending, self._last_emit + self._interval)

    def due(self, now_us: int) -> int | None:
        slot = self._slot()
        if slot is not None and slot < now_us:
            self._pending = None
            self._last_emit = slot
            return slot
        return None

    def flush(self) -> int | None:
        slot = self._slot()
        if slot is not None:
            self._pending = None
            self._last_emit = slot
        return slot


class StageContext:
    """Output channel handed to a stage while it runs."""

    def __init__(self, scheduler: Scheduler, stage_id: str, now_us: int):
        self._scheduler = scheduler
        self.stage_id = stage_id
        self.now_us = now_us

    def forward(self, event: Event) -> None:
        """Send an event to downstream stages without exposing it."""
        self._scheduler._route(self.stage_id, event)

    def emit(self, event: Event) -> Event:
        """Produce an observable event: stamped, routed, and returned."""
        stamped = self._scheduler._produce(self.stage_id, event)
        return stamped


class _DeferredSink:
    """Collects advance/flush emissions so they can be time-ordered
    across stages before being stamped. forward() is not meaningful
    outside event processing."""

    def __init__(self):
        self.buffered: list[Event] = []

    def emit(self, event: Event) -> Event:
        self.buffered.append(event)
        return event

    def forward(self, event: Event) -> None:
        raise RuntimeError("forward() is not available from advance/flush hooks")


class Scheduler:
    """Single-owner event processor for one device instance."""

    def __init__(self, graph: DeviceGraph):
        violations = validate_graph(graph)
        if violations:
            raise InvalidGraph(violations)
        self._graph = graph
        order = topological_order(graph)
        self._topo_index = {sid: i for i, sid in enumerate(order)}
        self._stages_in_order: list[Stage] = [graph.stages[sid] for sid in order]
        succ: dict[str, list[str]] = {sid: [] for sid in graph.stages}
        for u, v in graph.edges:
            succ[u].append(v)
        self._succ = {sid: sorted(vs, key=self._topo_index.__getitem__) for sid, vs in succ.items()}
        has_in = {v for _, v in graph.edges}
        self._roots = [s for s in self._stages_in_order if s.stage_id not in has_in]
        self._seq = 0
        self._last_t = 0
        self._queue: list[tuple[int, int, str, Event]] = []
        self._insertions = 0
        self._outputs: list[Event] = []
        for stage in self._stages_in_order:
            stage.behavior.reset()

    # -- internals ------------------------------------------------------

    def _produce(self, from_stage: str, event: Event) -> Event:
        stamped = replace(event, seq=self._seq)
        self._seq += 1
        self._outputs.append(stamped)
        self._route(from_stage, stamped)
        return stamped

    def _route(self, from_stage: str, event: Event) -> None:
        for sid in self._succ[from_stage]:
            if self._graph.stages[sid].accepts(event):
                heapq.heappush(self._queue, (self._topo_index[sid], self._insertions, sid, event))
                self._insertions += 1

    def _drain(self, now_us: int) -> None:
        while self._queue:
            _, _, sid, ev = heapq.heappop(self._queue)
            ctx = StageContext(self, sid, now_us)
            try:
                self._graph.stages[sid].behavior.on_event(ev, ctx)
            except Exception as exc:
                raise StagePanic(sid, exc) from exc

    def _run_deferred(self, call: Callable[[Stage, _DeferredSink], None]) -> None:
        """Collect hook emissions from every stage, then stamp and route
        them ordered by (emission time, stage topological position)."""
        buffered: list[tuple[int, int, str, Event]] = []
        for stage in self._stages_in_order:
            sink = _DeferredSink()
            try:
                call(stage, sink)
            except Exception as exc:
                raise StagePanic(stage.stage_id, exc) from exc
            for ev in sink.buffered:
                buffered.append((ev.t_us, self._topo_index[stage.stage_id], stage.stage_id, ev))
        buffered.sort(key=lambda item: (item[0], item[1]))
        for t_us, _, sid, ev in buffered:
            self._produce(sid, ev)
            self._drain(t_us)

    def _take_outputs(self) -> list[Event]:
        outputs = self._outputs
        self._outputs = []
        return outputs

    # -- public API -----------------------------------------------------

    @property
    def graph(self) -> DeviceGraph:
        return self._graph

    def ingest(self, event: Event) -> list[Event]:
        """Stamp an external event and process it; returns emitted events.

        Raises UnsortedStream if the timestamp precedes the previous
        ingested event's, ValueError for negative time or a non-finite
        stimulus value. Stimulus values are clamped to [0, 1] here.
        """
        if event.t_us < 0:
            raise ValueError(f"event time must be non-negative, got {event.t_us}")
        if event.t_us < self._last_t:
            raise UnsortedStream(f"event at t={event.t_us}us after t={self._last_t}us")
        if isinstance(event, Stimulus):
            if not math.isfinite(event.value):
                raise ValueError(f"stimulus value must be finite, got {event.value!r}")
            event = replace(event, value=min(max(event.value, 0.0), 1.0))
        self._last_t = event.t_us
        stamped = replace(event, seq=self._seq)
        self._seq += 1
        return self.step(stamped)

    def step(self, event: Event) -> list[Event]:
        """Process one stamped event.

        Returns every event that became observable during the step:
        deferred emissions whose slot fell before the event's time, then
        the cascade the event itself produced (those carry t >= event.t_us).
        """
        self._run_deferred(lambda stage, sink: stage.behavior.advance(event.t_us, sink))
        for stage in self._roots:
            if stage.accepts(event):
                heapq.heappush(
                    self._queue, (self._topo_index[stage.stage_id], self._insertions, stage.stage_id, event)
                )
                self._insertions += 1
        self._drain(event.t_us)
        return self._take_outputs()

    def advance_time(self, now_us: int) -> list[Event]:
        """Commit deferred emissions due strictly before now_us."""
        self._run_deferred(lambda stage, sink: stage.behavior.advance(now_us, sink))
        return self._take_outputs()

    def flush(self) -> list[Event]:
        """Commit all remaining deferred emissions at end of stream."""
        self._run_deferred(lambda stage, sink: stage.behavior.flush(sink))
        return self._take_outputs()


def run_replay(graph: DeviceGraph, stimuli: Iterable[Event]) -> list[Control]:
    """Feed a sorted event stream through a fresh scheduler; return the
    Control events it produced, in emission order.

    Pure function of (graph, stimuli): repeated runs give identical
    results. Raises InvalidGraph or UnsortedStream.
    """
    scheduler = Scheduler(graph)
    controls: list[Control] = []
    for event in stimuli:
        controls.extend(e for e in scheduler.ingest(event) if isinstance(e, Control))
    controls.extend(e for e in scheduler.flush() if isinstance(e, Control))
    return controls


__all__ = [
    "InvalidGraph",
    "UnsortedStream",
    "StagePanic",
    "Throttle",
    "ThrottleGate",
    "StageContext",
    "Scheduler",
    "run_replay",
]
