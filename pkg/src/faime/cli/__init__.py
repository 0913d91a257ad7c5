"""Command line interface and the WebSocket bridge."""

from .bridge import BridgeResult, DeviceSession, serve_bridge
from .config import (
    ConfigFileError,
    DeviceConfigFile,
    build_device,
    load_samples,
    parse_config,
    parse_target,
)
from .main import cli

__all__ = [
    "BridgeResult",
    "DeviceSession",
    "serve_bridge",
    "ConfigFileError",
    "DeviceConfigFile",
    "build_device",
    "load_samples",
    "parse_config",
    "parse_target",
    "cli",
]
