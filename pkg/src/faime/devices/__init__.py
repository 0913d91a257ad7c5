"""Reference devices and the taxonomy registry."""

from .base import ConfigError, DeviceDescriptor, LogFeedback, Passthrough
from .emotiwatch import (
    EmotiWatchConfig,
    Track,
    build_emotiwatch,
    recommend_track,
)
from .taxonomy import (
    CATEGORY_NAMES,
    SUBCATEGORY_NAMES,
    InvalidCode,
    TaxonomyCode,
    all_codes,
    validate_taxonomy,
)
from .theralmin import (
    NOTE_ADDRESS,
    OutOfRange,
    TherAlminConfig,
    Timbre,
    amp_map,
    build_theralmin,
    pitch_map,
    timbre_select,
)

__all__ = [
    "ConfigError",
    "DeviceDescriptor",
    "LogFeedback",
    "Passthrough",
    "EmotiWatchConfig",
    "Track",
    "build_emotiwatch",
    "recommend_track",
    "CATEGORY_NAMES",
    "SUBCATEGORY_NAMES",
    "InvalidCode",
    "TaxonomyCode",
    "all_codes",
    "validate_taxonomy",
    "NOTE_ADDRESS",
    "OutOfRange",
    "TherAlminConfig",
    "Timbre",
    "amp_map",
    "build_theralmin",
    "pitch_map",
    "timbre_select",
]
