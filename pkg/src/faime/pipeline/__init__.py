"""Stage-graph pipeline: events, graph validation, deterministic scheduling."""

from .events import (
    ClassDecision,
    Control,
    Event,
    Gesture,
    ReplayFormatError,
    Stimulus,
    event_from_json,
    load_replay,
    read_replay,
    write_replay,
)
from .graph import (
    Binding,
    BindingSource,
    DeviceGraph,
    LearningOutput,
    Stage,
    StageBehavior,
    StageKind,
    StimulusChannel,
    Violation,
    device_graph,
    stimulus_bound_parameters,
    topological_order,
    validate_graph,
)
from .scheduler import (
    InvalidGraph,
    Scheduler,
    StagePanic,
    Throttle,
    ThrottleGate,
    UnsortedStream,
    run_replay,
)

__all__ = [
    "ClassDecision",
    "Control",
    "Event",
    "Gesture",
    "ReplayFormatError",
    "Stimulus",
    "event_from_json",
    "load_replay",
    "read_replay",
    "write_replay",
    "Binding",
    "BindingSource",
    "DeviceGraph",
    "LearningOutput",
    "Stage",
    "StageBehavior",
    "StageKind",
    "StimulusChannel",
    "Violation",
    "device_graph",
    "stimulus_bound_parameters",
    "topological_order",
    "validate_graph",
    "InvalidGraph",
    "Scheduler",
    "StagePanic",
    "Throttle",
    "ThrottleGate",
    "UnsortedStream",
    "run_replay",
]
