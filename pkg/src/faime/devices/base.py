"""Shared device plumbing: descriptors and generic stage behaviors."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..learning import CentroidModel, classify
from ..pipeline import ClassDecision, DeviceGraph, Event, Gesture, StageBehavior

log = logging.getLogger(__name__)


class ConfigError(Exception):
    """A device configuration violates its invariants."""


@dataclass(frozen=True)
class DeviceDescriptor:
    """A named device: taxonomy codes plus its stage graph."""

    name: str
    codes: frozenset
    graph: DeviceGraph

    def __post_init__(self):
        if not self.codes:
            raise ConfigError(f"device {self.name!r} needs at least one taxonomy code")


class Passthrough(StageBehavior):
    """Forwards every event unchanged (identity capture/adaptation)."""

    def on_event(self, event: Event, ctx) -> None:
        ctx.forward(event)


class CentroidClassifier(StageBehavior):
    """Learning stage: classifies gesture features against a model."""

    def __init__(self, model: CentroidModel):
        self._model = model

    def on_event(self, event: Event, ctx) -> None:
        assert isinstance(event, Gesture)
        decision = classify(self._model, event.features)
        ctx.emit(ClassDecision(label=decision.label, confidence=decision.confidence, t_us=event.t_us))


class LogFeedback(StageBehavior):
    """Terminal sink: counts and logs everything it sees."""

    def __init__(self):
        self.events_seen = 0

    def reset(self) -> None:
        self.events_seen = 0

    def on_event(self, event: Event, ctx) -> None:
        self.events_seen += 1
        log.debug("feedback: %r", event)


__all__ = [
    "ConfigError",
    "DeviceDescriptor",
    "Passthrough",
    "CentroidClassifier",
    "LogFeedback",
]
