"""Events flowing through a device pipeline.

Every event carries `t_us`, a non-negative microsecond timestamp, and
`seq`, a monotonically increasing counter stamped by the scheduler at
ingestion (producer code leaves it at -1). Equal timestamps are ordered
by seq, so a run is a total order.

The replay file format is JSON Lines, one event per line, sorted by
t_us:

    {"kind": "stimulus", "channel": "pitch", "value": 0.42, "t_us": 1000}
    {"kind": "gesture", "features": [0.1, 0.9], "t_us": 2000}
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator

from ..osc import OscMessage


@dataclass(frozen=True, slots=True)
class Stimulus:
    """One sample from a capture channel, normalized to [0, 1]."""

    channel: str
    value: float
    t_us: int
    seq: int = -1


@dataclass(frozen=True, slots=True)
class Gesture:
    """A pre-extracted gesture feature vector."""

    features: tuple[float, ...]
    t_us: int
    seq: int = -1


@dataclass(frozen=True, slots=True)
class ClassDecision:
    """A classified label with its confidence in [0, 1]."""

    label: str
    confidence: float
    t_us: int
    seq: int = -1


@dataclass(frozen=True, slots=True)
class Control:
    """A control message bound for the production layer or the wire."""

    message: OscMessage
    t_us: int
    seq: int = -1


Event = Stimulus | Gesture | ClassDecision | Control


class ReplayFormatError(Exception):
    """A replay line is not a well-formed stimulus or gesture record."""


def event_from_json(obj: dict) -> Stimulus | Gesture:
    """Build an ingestable event from one parsed replay record."""
    kind = obj.get("kind")
    t_us = obj.get("t_us")
    if not isinstance(t_us, int) or t_us < 0:
        raise ReplayFormatError(f"t_us must be a non-negative integer, got {t_us!r}")
    if kind == "stimulus":
        channel = obj.get("channel")
        value = obj.get("value")
        if not isinstance(channel, str) or not channel:
            raise ReplayFormatError(f"stimulus channel must be a non-empty string, got {channel!r}")
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            raise ReplayFormatError(f"stimulus value must be a finite number, got {value!r}")
        return Stimulus(channel=channel, value=float(value), t_us=t_us)
    if kind == "gesture":
        features = obj.get("features")
        if not isinstance(features, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in features
        ):
            raise ReplayFormatError(f"gesture features must be a list of finite numbers, got {features!r}")
        return Gesture(features=tuple(float(v) for v in features), t_us=t_us)
    raise ReplayFormatError(f"unknown event kind {kind!r}")


def read_replay(lines: Iterable[str]) -> Iterator[Stimulus | Gesture]:
    """Parse replay lines, reporting the offending line number on error."""
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ReplayFormatError(f"line {lineno}: invalid JSON: {exc}") from None
        if not isinstance(obj, dict):
            raise ReplayFormatError(f"line {lineno}: expected an object")
        try:
            yield event_from_json(obj)
        except ReplayFormatError as exc:
            raise ReplayFormatError(f"line {lineno}: {exc}") from None


def load_replay(path: str | Path) -> list[Stimulus | Gesture]:
    """Load a JSON Lines replay file."""
    with open(path, "r", encoding="utf-8") as fh:
        return list(read_replay(fh))


def write_replay(events: Iterable[Stimulus | Gesture], fh: IO[str]) -> None:
    """Write events in the replay file format."""
    for e in events:
        if isinstance(e, Stimulus):
            record = {"kind": "stimulus", "channel": e.channel, "value": e.value, "t_us": e.t_us}
        elif isinstance(e, Gesture):
            record = {"kind": "gesture", "features": list(e.features), "t_us": e.t_us}
        else:
            raise ReplayFormatError(f"only stimulus/gesture events are replayable, got {type(e).__name__}")
        fh.write(json.dumps(record) + "\n")


__all__ = [
    "Stimulus",
    "Gesture",
    "ClassDecision",
    "Control",
    "Event",
    "ReplayFormatError",
    "event_from_json",
    "read_replay",
    "load_replay",
    "write_replay",
]
