"""EmotiWatch-sim: mood-driven track recommendation from wearable channels.

Three normalized sensor channels (hrv, eda, spo2) are fused into a
feature vector, classified into a mood, and the mood picks a track from
the catalog. The player is told to switch only when the mood actually
changes, so a steady state never spams it.

Emitted wire format: /player/play  s   (track id)
"""

from __future__ import annotations

from dataclasses import dataclass

from ..learning import CentroidModel, Classification
from ..osc import OscMessage
from ..pipeline import (
    Binding,
    Control,
    Gesture,
    LearningOutput,
    Stage,
    StageBehavior,
    StageKind,
    Stimulus,
    Throttle,
    ThrottleGate,
    device_graph,
)
from ..pipeline.events import ClassDecision, Event
from .base import CentroidClassifier, ConfigError, DeviceDescriptor, LogFeedback, Passthrough
from .taxonomy import TaxonomyCode

SENSOR_CHANNELS = ("hrv", "eda", "spo2")
PLAY_ADDRESS = "/player/play"
TRACK_ADDRESS = "/player/track"
DEFAULT_TARGET = ("127.0.0.1", 4560)


@dataclass(frozen=True, slots=True)
class Track:
    track_id: str
    mood: str
    energy: float


@dataclass(frozen=True)
class EmotiWatchConfig:
    model: CentroidModel
    catalog: tuple[Track, ...]
    target: tuple[str, int] = DEFAULT_TARGET
    throttle: Throttle = Throttle()

    def __post_init__(self):
        if not self.catalog:
            raise ConfigError("catalog must not be empty")
        if self.model.dim != len(SENSOR_CHANNELS):
            raise ConfigError(
                f"mood model must have dim {len(SENSOR_CHANNELS)}, got {self.model.dim}"
            )
        known = set(self.model.centroids) | {self.model.background_label}
        for track in self.catalog:
            if track.mood not in known:
                raise ConfigError(f"track {track.track_id!r} has unknown mood tag {track.mood!r}")


def recommend_track(mood: Classification | ClassDecision, catalog: tuple[Track, ...]) -> str:
    """Pick the lowest track id tagged with the mood's label; if nothing
    matches (background included), the lowest id overall."""
    matching = [t for t in catalog if t.mood == mood.label] or list(catalog)
    return min(t.track_id for t in matching)


class SensorFusion(StageBehavior):
    """Stimulus adaptation: latest value per channel, fused into one
    feature vector per update (unseen channels read 0.0)."""

    def __init__(self):
        self._values = {ch: 0.0 for ch in SENSOR_CHANNELS}

    def reset(self) -> None:
        self._values = {ch: 0.0 for ch in SENSOR_CHANNELS}

    def on_event(self, event: Event, ctx) -> None:
        assert isinstance(event, Stimulus)
        if event.channel not in self._values:
            return
        self._values[event.channel] = event.value
        features = tuple(self._values[ch] for ch in SENSOR_CHANNELS)
        ctx.forward(Gesture(features=features, t_us=event.t_us))


class TrackSelector(StageBehavior):
    """Music adaptation: mood label -> track id, edge-triggered on mood
    change only."""

    def __init__(self, catalog: tuple[Track, ...]):
        self._catalog = catalog
        self._last_label: str | None = None

    def reset(self) -> None:
        self._last_label = None

    def on_event(self, event: Event, ctx) -> None:
        assert isinstance(event, ClassDecision)
        if event.label == self._last_label:
            return
        self._last_label = event.label
        track_id = recommend_track(event, self._catalog)
        ctx.forward(Control(OscMessage(TRACK_ADDRESS, (track_id,)), t_us=event.t_us))


class PlayProduction(StageBehavior):
    """Production: emits throttled /player/play messages for the
    currently selected track."""

    def __init__(self, throttle: Throttle):
        self._gate = ThrottleGate(throttle)
        self._track: str | None = None

    def reset(self) -> None:
        self._gate.reset()
        self._track = None

    def on_event(self, event: Event, ctx) -> None:
        if isinstance(event, Control) and event.message.address == TRACK_ADDRESS:
            self._track = event.message.args[0]
            self._gate.request(event.t_us)

    def advance(self, now_us: int, ctx) -> None:
        slot = self._gate.due(now_us)
        if slot is not None:
            ctx.emit(Control(OscMessage(PLAY_ADDRESS, (self._track,)), t_us=slot))

    def flush(self, ctx) -> None:
        slot = self._gate.flush()
        if slot is not None:
            ctx.emit(Control(OscMessage(PLAY_ADDRESS, (self._track,)), t_us=slot))


def build_emotiwatch(cfg: EmotiWatchConfig) -> DeviceDescriptor:
    """Assemble the EmotiWatch stage graph: sensors -> fusion -> mood
    classifier -> edge-triggered track selection -> player production."""
    stages = [
        Stage(f"capture_{ch}", StageKind.STIMULUS_CAPTURE, Passthrough(),
              consumes=frozenset({Stimulus}), channels=frozenset({ch}))
        for ch in SENSOR_CHANNELS
    ] + [
        Stage("fuse_sensors", StageKind.STIMULUS_ADAPTATION, SensorFusion(),
              consumes=frozenset({Stimulus})),
        Stage("classify", StageKind.LEARNING, CentroidClassifier(cfg.model),
              consumes=frozenset({Gesture})),
        Stage("select_track", StageKind.MUSIC_ADAPTATION, TrackSelector(cfg.catalog),
              consumes=frozenset({ClassDecision})),
        Stage("play", StageKind.PRODUCTION, PlayProduction(cfg.throttle),
              consumes=frozenset({Control})),
        Stage("log_feedback", StageKind.FEEDBACK, LogFeedback(),
              consumes=frozenset({Control})),
    ]
    edges = [(f"capture_{ch}", "fuse_sensors") for ch in SENSOR_CHANNELS] + [
        ("fuse_sensors", "classify"),
        ("classify", "select_track"),
        ("select_track", "play"),
        ("play", "log_feedback"),
    ]
    bindings = [Binding("track", LearningOutput("classify"))]
    graph = device_graph(stages, edges, bindings)
    return DeviceDescriptor(name="emotiwatch", codes=frozenset({TaxonomyCode(4, "b")}), graph=graph)


__all__ = [
    "SENSOR_CHANNELS",
    "PLAY_ADDRESS",
    "TRACK_ADDRESS",
    "DEFAULT_TARGET",
    "Track",
    "EmotiWatchConfig",
    "recommend_track",
    "SensorFusion",
    "TrackSelector",
    "PlayProduction",
    "build_emotiwatch",
]
