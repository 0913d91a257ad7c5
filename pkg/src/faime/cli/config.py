"""Device configuration files.

A config file is JSON selecting a device kind plus its settings:

    {
      "device": "theralmin",
      "model": "model.json",
      "target": "127.0.0.1:4560",
      "throttle_hz": 100,
      "ws_port": 8765,
      "codes": ["1b"],
      "theralmin": {
        "f_min": 65.41,
        "f_max": 2093.0,
        "timbres": {"fist": {"synth": "saw", "effects": {"cutoff": 0.3}}},
        "default_timbre": {"synth": "sine", "effects": {}}
      }
    }

The emotiwatch variant replaces the "theralmin" section with

    "emotiwatch": {"catalog": [{"id": "t1", "mood": "calm", "energy": 0.2}]}

Relative paths are resolved against the config file's directory. "codes"
overrides the device's default taxonomy codes. Training samples are
JSON Lines: {"label": "fist", "features": [0.1, 0.9]} per line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from ..devices import (
    DeviceDescriptor,
    EmotiWatchConfig,
    TherAlminConfig,
    Timbre,
    Track,
    build_emotiwatch,
    build_theralmin,
    validate_taxonomy,
)
from ..learning import LabeledSample, load_model
from ..pipeline import Throttle

DEVICE_KINDS = ("theralmin", "emotiwatch")
DEFAULT_TARGET = ("127.0.0.1", 4560)
DEFAULT_WS_PORT = 8765


class ConfigFileError(Exception):
    """The config file is missing, unreadable, or structurally wrong."""


def parse_target(text: str) -> tuple[str, int]:
    host, sep, port = text.rpartition(":")
    if not sep or not host:
        raise ConfigFileError(f"target must be host:port, got {text!r}")
    try:
        port_num = int(port)
    except ValueError:
        raise ConfigFileError(f"target port must be an integer, got {port!r}") from None
    if not 0 < port_num < 65536:
        raise ConfigFileError(f"target port out of range: {port_num}")
    return host, port_num


@dataclass
class DeviceConfigFile:
    """Parsed config file, before the device graph is built."""

    path: Path
    kind: str
    model_path: Path
    target: tuple[str, int]
    throttle: Throttle
    ws_port: int
    codes: list[str] | None
    section: dict


def parse_config(path: str | Path) -> DeviceConfigFile:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigFileError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigFileError(f"{path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigFileError(f"{path}: top level must be an object")

    kind = raw.get("device")
    if kind not in DEVICE_KINDS:
        raise ConfigFileError(f"{path}: device must be one of {DEVICE_KINDS}, got {kind!r}")

    model_name = raw.get("model")
    if not isinstance(model_name, str):
        raise ConfigFileError(f"{path}: missing model file path")
    model_path = (path.parent / model_name).resolve()
    if not model_path.is_file():
        raise ConfigFileError(f"{path}: model file does not exist: {model_path}")

    target = parse_target(raw.get("target", "%s:%d" % DEFAULT_TARGET))

    throttle_hz = raw.get("throttle_hz", 100)
    if not isinstance(throttle_hz, (int, float)) or isinstance(throttle_hz, bool) or throttle_hz <= 0:
        raise ConfigFileError(f"{path}: throttle_hz must be a positive number, got {throttle_hz!r}")

    ws_port = raw.get("ws_port", DEFAULT_WS_PORT)
    if not isinstance(ws_port, int) or isinstance(ws_port, bool) or not 0 <= ws_port < 65536:
        raise ConfigFileError(f"{path}: ws_port must be a port number, got {ws_port!r}")

    codes = raw.get("codes")
    if codes is not None and (
        not isinstance(codes, list) or not all(isinstance(c, str) for c in codes)
    ):
        raise ConfigFileError(f"{path}: codes must be a list of strings")

    section = raw.get(kind, {})
    if not isinstance(section, dict):
        raise ConfigFileError(f"{path}: {kind} section must be an object")

    return DeviceConfigFile(
        path=path,
        kind=kind,
        model_path=model_path,
        target=target,
        throttle=Throttle(float(throttle_hz)),
        ws_port=ws_port,
        codes=codes,
        section=section,
    )


def _parse_timbre(obj: dict, where: str) -> Timbre:
    synth = obj.get("synth")
    if not isinstance(synth, str) or not synth:
        raise ConfigFileError(f"{where}: synth must be a non-empty string")
    effects_obj = obj.get("effects", {})
    if not isinstance(effects_obj, dict):
        raise ConfigFileError(f"{where}: effects must be an object of name -> value")
    effects = []
    for name, value in effects_obj.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigFileError(f"{where}: effect {name!r} must be numeric")
        effects.append((str(name), float(value)))
    return Timbre(synth=synth, effects=tuple(effects))


def build_device(cfg: DeviceConfigFile) -> DeviceDescriptor:
    """Load the model and assemble the configured device graph."""
    try:
        model = load_model(cfg.model_path)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise ConfigFileError(f"cannot load model {cfg.model_path}: {exc}") from None

    if cfg.kind == "theralmin":
        kwargs: dict = {"target": cfg.target, "throttle": cfg.throttle}
        if "f_min" in cfg.section:
            kwargs["f_min"] = float(cfg.section["f_min"])
        if "f_max" in cfg.section:
            kwargs["f_max"] = float(cfg.section["f_max"])
        if "timbres" in cfg.section:
            kwargs["timbres"] = {
                label: _parse_timbre(t, f"timbre {label!r}")
                for label, t in cfg.section["timbres"].items()
            }
        if "default_timbre" in cfg.section:
            kwargs["default_timbre"] = _parse_timbre(cfg.section["default_timbre"], "default_timbre")
        descriptor = build_theralmin(TherAlminConfig(**kwargs), model)
    else:
        catalog = []
        for i, entry in enumerate(cfg.section.get("catalog", [])):
            if not isinstance(entry, dict) or not isinstance(entry.get("id"), str):
                raise ConfigFileError(f"catalog entry {i}: need an object with an 'id'")
            catalog.append(
                Track(
                    track_id=entry["id"],
                    mood=str(entry.get("mood", "")),
                    energy=float(entry.get("energy", 0.0)),
                )
            )
        descriptor = build_emotiwatch(
            EmotiWatchConfig(model=model, catalog=tuple(catalog), target=cfg.target, throttle=cfg.throttle)
        )

    if cfg.codes is not None:
        codes = frozenset(validate_taxonomy(c) for c in cfg.codes)
        descriptor = DeviceDescriptor(name=descriptor.name, codes=codes, graph=descriptor.graph)
    return descriptor


def load_samples(path: str | Path) -> list[LabeledSample]:
    """Read a JSON Lines training set: {"label": ..., "features": [...]}."""
    samples: list[LabeledSample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ConfigFileError(f"{path}:{lineno}: invalid JSON: {exc}") from None
            label = obj.get("label") if isinstance(obj, dict) else None
            features = obj.get("features") if isinstance(obj, dict) else None
            if not isinstance(label, str) or not isinstance(features, list) or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
                for v in features
            ):
                raise ConfigFileError(
                    f"{path}:{lineno}: expected {{'label': str, 'features': [numbers]}}"
                )
            samples.append(LabeledSample(label=label, features=tuple(float(v) for v in features)))
    return samples


__all__ = [
    "DEVICE_KINDS",
    "DEFAULT_TARGET",
    "DEFAULT_WS_PORT",
    "ConfigFileError",
    "DeviceConfigFile",
    "parse_target",
    "parse_config",
    "build_device",
    "load_samples",
]
