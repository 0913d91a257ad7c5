"""TherAlmin: a theremin whose timbre is steered by classified gestures.

Two antenna channels ("pitch", "volume") drive note frequency and
amplitude continuously; gesture feature vectors are classified and the
resulting label selects a synth/effect preset. Misclassified gestures
can therefore only ever pick the wrong timbre -- note frequency and
amplitude are bound to the antenna channels alone, and the graph
bindings state that mechanically.

Emitted wire format, throttled per address:

    /theralmin/note  ff s (s f)*   frequency Hz, amplitude, synth name,
                                   then effect name/value pairs
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from ..learning import CentroidModel
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
    StimulusChannel,
    Throttle,
    ThrottleGate,
    device_graph,
)
from ..pipeline.events import ClassDecision, Event
from .base import CentroidClassifier, ConfigError, DeviceDescriptor, LogFeedback, Passthrough
from .taxonomy import TaxonomyCode

PITCH_CHANNEL = "pitch"
VOLUME_CHANNEL = "volume"
NOTE_ADDRESS = "/theralmin/note"
TIMBRE_ADDRESS = "/theralmin/timbre"

DEFAULT_F_MIN = 65.41  # C2
DEFAULT_F_MAX = 2093.0  # C7
DEFAULT_TARGET = ("127.0.0.1", 4560)


class OutOfRange(Exception):
    """A normalized control value fell outside [0, 1]."""


@dataclass(frozen=True, slots=True)
class Timbre:
    """A synth choice plus ordered effect parameters."""

    synth: str
    effects: tuple[tuple[str, float], ...] = ()


DEFAULT_TIMBRES: dict[str, Timbre] = {
    "fist": Timbre("saw", (("cutoff", 0.3),)),
    "open": Timbre("prophet", (("sustain", 0.7),)),
    "point": Timbre("square", (("res", 0.5),)),
}
DEFAULT_TIMBRE = Timbre("sine")


@dataclass(frozen=True)
class TherAlminConfig:
    f_min: float = DEFAULT_F_MIN
    f_max: float = DEFAULT_F_MAX
    timbres: Mapping[str, Timbre] = field(default_factory=lambda: dict(DEFAULT_TIMBRES))
    default_timbre: Timbre = DEFAULT_TIMBRE
    target: tuple[str, int] = DEFAULT_TARGET
    throttle: Throttle = Throttle()

    def __post_init__(self):
        if not (0 < self.f_min < self.f_max):
            raise ConfigError(f"need 0 < f_min < f_max, got {self.f_min}..{self.f_max}")
        if not self.timbres:
            raise ConfigError("timbre table must not be empty")


def pitch_map(p: float, cfg: TherAlminConfig) -> float:
    """Map a normalized antenna value to Hz, exponentially.

    Equal steps of p are equal musical intervals: f_min * (f_max/f_min)^p.
    """
    if not (0.0 <= p <= 1.0):
        raise OutOfRange(f"pitch value {p!r} outside [0, 1]")
    return cfg.f_min * (cfg.f_max / cfg.f_min) ** p


def amp_map(v: float) -> float:
    """Map a normalized volume value to amplitude (linear law)."""
    if not (0.0 <= v <= 1.0):
        raise OutOfRange(f"volume value {v!r} outside [0, 1]")
    return v


def timbre_select(label: str, cfg: TherAlminConfig) -> Timbre:
    """Look up the timbre for a class label; background or unknown
    labels fall back to the default timbre."""
    return cfg.timbres.get(label, cfg.default_timbre)


def _timbre_to_args(timbre: Timbre) -> tuple:
    args: list = [timbre.synth]
    for name, value in timbre.effects:
        args.extend((name, float(value)))
    return tuple(args)


def _timbre_from_args(args: tuple) -> Timbre:
    effects = tuple((args[i], args[i + 1]) for i in range(1, len(args) - 1, 2))
    return Timbre(synth=args[0], effects=effects)


class TimbreSelector(StageBehavior):
    """Music adaptation: class label -> timbre preset, passed downstream
    as an internal control message."""

    def __init__(self, cfg: TherAlminConfig):
        self._cfg = cfg

    def on_event(self, event: Event, ctx) -> None:
        assert isinstance(event, ClassDecision)
        timbre = timbre_select(event.label, self._cfg)
        ctx.forward(Control(OscMessage(TIMBRE_ADDRESS, _timbre_to_args(timbre)), t_us=event.t_us))


class NoteProduction(StageBehavior):
    """Production: holds the current note parameters and emits throttled
    /theralmin/note messages.

    Only antenna (stimulus) updates request an emission; timbre updates
    ride along with the next note message. The gesture stream therefore
    cannot influence when notes are sent or what frequency/amplitude
    they carry.
    """

    def __init__(self, cfg: TherAlminConfig):
        self._cfg = cfg
        self._gate = ThrottleGate(cfg.throttle)
        self._freq = pitch_map(0.0, cfg)
        self._amp = amp_map(0.0)
        self._timbre = cfg.default_timbre

    def reset(self) -> None:
        self._gate.reset()
        self._freq = pitch_map(0.0, self._cfg)
        self._amp = amp_map(0.0)
        self._timbre = self._cfg.default_timbre

    def on_event(self, event: Event, ctx) -> None:
        if isinstance(event, Stimulus):
            if event.channel == PITCH_CHANNEL:
                self._freq = pitch_map(event.value, self._cfg)
            elif event.channel == VOLUME_CHANNEL:
                self._amp = amp_map(event.value)
            else:
                return
            self._gate.request(event.t_us)
        elif isinstance(event, Control) and event.message.address == TIMBRE_ADDRESS:
            self._timbre = _timbre_from_args(event.message.args)

    def advance(self, now_us: int, ctx) -> None:
        slot = self._gate.due(now_us)
        if slot is not None:
            ctx.emit(self._note(slot))

    def flush(self, ctx) -> None:
        slot = self._gate.flush()
        if slot is not None:
            ctx.emit(self._note(slot))

    def _note(self, t_us: int) -> Control:
        args = (float(self._freq), float(self._amp)) + _timbre_to_args(self._timbre)
        return Control(OscMessage(NOTE_ADDRESS, args), t_us=t_us)


def build_theralmin(cfg: TherAlminConfig, model: CentroidModel) -> DeviceDescriptor:
    """Assemble the TherAlmin stage graph.

    Antennas feed production through capture/adaptation; gestures feed
    the classifier, whose label picks a timbre that joins the note at
    production. Frequency and amplitude are bound to stimulus channels
    only, timbre to the learning stage only.
    """
    stages = [
        Stage("capture_pitch", StageKind.STIMULUS_CAPTURE, Passthrough(),
              consumes=frozenset({Stimulus}), channels=frozenset({PITCH_CHANNEL})),
        Stage("capture_volume", StageKind.STIMULUS_CAPTURE, Passthrough(),
              consumes=frozenset({Stimulus}), channels=frozenset({VOLUME_CHANNEL})),
        Stage("capture_gesture", StageKind.STIMULUS_CAPTURE, Passthrough(),
              consumes=frozenset({Gesture})),
        Stage("adapt_antenna", StageKind.STIMULUS_ADAPTATION, Passthrough(),
              consumes=frozenset({Stimulus})),
        Stage("classify", StageKind.LEARNING, CentroidClassifier(model),
              consumes=frozenset({Gesture})),
        Stage("select_timbre", StageKind.MUSIC_ADAPTATION, TimbreSelector(cfg),
              consumes=frozenset({ClassDecision})),
        Stage("produce_note", StageKind.PRODUCTION, NoteProduction(cfg),
              consumes=frozenset({Stimulus, Control}),
              channels=frozenset({PITCH_CHANNEL, VOLUME_CHANNEL})),
        Stage("log_feedback", StageKind.FEEDBACK, LogFeedback(),
              consumes=frozenset({Control})),
    ]
    edges = [
        ("capture_pitch", "adapt_antenna"),
        ("capture_volume", "adapt_antenna"),
        ("adapt_antenna", "produce_note"),
        ("capture_gesture", "classify"),
        ("classify", "select_timbre"),
        ("select_timbre", "produce_note"),
        ("produce_note", "log_feedback"),
    ]
    bindings = [
        Binding("freq", StimulusChannel(PITCH_CHANNEL)),
        Binding("amp", StimulusChannel(VOLUME_CHANNEL)),
        Binding("timbre", LearningOutput("classify")),
    ]
    graph = device_graph(stages, edges, bindings)
    return DeviceDescriptor(name="theralmin", codes=frozenset({TaxonomyCode(1, "b")}), graph=graph)


__all__ = [
    "PITCH_CHANNEL",
    "VOLUME_CHANNEL",
    "NOTE_ADDRESS",
    "TIMBRE_ADDRESS",
    "DEFAULT_F_MIN",
    "DEFAULT_F_MAX",
    "DEFAULT_TARGET",
    "DEFAULT_TIMBRES",
    "DEFAULT_TIMBRE",
    "OutOfRange",
    "Timbre",
    "TherAlminConfig",
    "pitch_map",
    "amp_map",
    "timbre_select",
    "TimbreSelector",
    "NoteProduction",
    "build_theralmin",
]
