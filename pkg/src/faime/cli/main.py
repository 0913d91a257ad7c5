"""Command line entry points: validate, run, train, osc-send.

Exit codes are part of the interface:

    validate   0 clean | 1 violations | 2 parse failure
    run        0 ok | 1 validation | 2 I/O | 3 bind failure
    train      0 ok | 1 bad dataset or tau | 2 I/O
    osc-send   0 ok | 1 argument parse | 2 send failure

Summaries go to stdout as one "key: value" per line. FAIME_LOG=debug|info
controls logging.
"""

from __future__ import annotations

import asyncio
import logging
import os
import sys

import click

from .. import __version__
from ..devices import ConfigError, InvalidCode, validate_taxonomy
from ..learning import LearningError, save_model, train_centroids
from ..osc import InvariantViolation, OscMessage, encode_packet
from ..pipeline import ReplayFormatError, UnsortedStream, load_replay, run_replay, validate_graph
from ..transport import BindFailure, SendFailure, TransportError, open_endpoint
from .bridge import DeviceSession, serve_bridge
from .config import ConfigFileError, build_device, load_samples, parse_config, parse_target


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _kv(key: str, value) -> None:
    click.echo(f"{key}: {value}")


@click.group()
@click.version_option(version=__version__, prog_name="faime")
def cli() -> None:
    """Stage-graph musical devices speaking OSC over UDP."""
    level = {"debug": logging.DEBUG, "info": logging.INFO}.get(
        os.environ.get("FAIME_LOG", "").lower(), logging.WARNING
    )
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.argument("config_path", type=click.Path())
def validate(config_path: str) -> None:
    """Check a device config: taxonomy codes and graph structure."""
    try:
        cfg = parse_config(config_path)
    except ConfigFileError as exc:
        _fail(2, str(exc))

    problems: list[str] = []
    for code in cfg.codes or []:
        try:
            validate_taxonomy(code)
        except InvalidCode as exc:
            problems.append(f"InvalidCode: {exc}")
    if problems:
        cfg.codes = None  # still check the graph, on the device's default codes

    try:
        descriptor = build_device(cfg)
    except ConfigFileError as exc:
        _fail(2, str(exc))
    except (ConfigError, InvalidCode) as exc:
        problems.append(f"{type(exc).__name__}: {exc}")
    else:
        problems.extend(f"violation: {v}" for v in validate_graph(descriptor.graph))

    for line in problems:
        click.echo(line)
    _kv("device", cfg.kind)
    _kv("problems", len(problems))
    sys.exit(0 if not problems else 1)


@cli.command()
@click.argument("config_path", type=click.Path())
@click.option("--replay", "replay_path", type=click.Path(), default=None, help="Replay a JSONL event trace.")
@click.option("--live", is_flag=True, help="Serve the WebSocket bridge until interrupted.")
@click.option("--target", "target_text", default=None, help="Override the OSC target, host:port.")
@click.option("--ws-port", type=int, default=None, help="Override the bridge port (0 = ephemeral).")
def run(config_path: str, replay_path: str | None, live: bool, target_text: str | None, ws_port: int | None) -> None:
    """Run a device from a replay trace or live from the bridge."""
    if (replay_path is None) == (not live):
        _fail(1, "pick exactly one of --replay FILE or --live")
    try:
        cfg = parse_config(config_path)
        target = parse_target(target_text) if target_text else cfg.target
    except ConfigFileError as exc:
        _fail(2, str(exc))
    try:
        descriptor = build_device(cfg)
    except ConfigFileError as exc:
        _fail(2, str(exc))
    except (ConfigError, InvalidCode) as exc:
        _fail(1, str(exc))

    if replay_path is not None:
        try:
            events = load_replay(replay_path)
        except OSError as exc:
            _fail(2, f"cannot read replay file: {exc}")
        except ReplayFormatError as exc:
            _fail(2, str(exc))
        try:
            controls = run_replay(descriptor.graph, events)
        except UnsortedStream as exc:
            _fail(1, f"replay stream not sorted by t_us: {exc}")
        try:
            endpoint = open_endpoint("0.0.0.0", 0)
        except BindFailure as exc:
            _fail(3, str(exc))
        try:
            for control in controls:
                endpoint.send(control.message, target)
        except SendFailure as exc:
            _fail(2, str(exc))
        finally:
            endpoint.close()
        _kv("device", descriptor.name)
        _kv("events_in", len(events))
        _kv("events_out", len(controls))
        _kv("target", "%s:%d" % target)
        sys.exit(0)

    port = cfg.ws_port if ws_port is None else ws_port
    session = DeviceSession(descriptor)
    try:
        endpoint = open_endpoint("0.0.0.0", 0)
    except BindFailure as exc:
        _fail(3, str(exc))

    def on_bound(bound_port: int) -> None:
        _kv("device", descriptor.name)
        _kv("ws_port", bound_port)
        _kv("target", "%s:%d" % target)
        sys.stdout.flush()

    try:
        asyncio.run(
            serve_bridge(session, "127.0.0.1", port, udp=endpoint, udp_target=target, on_bound=on_bound)
        )
    except KeyboardInterrupt:
        pass
    except OSError as exc:
        _fail(3, f"cannot bind WebSocket port {port}: {exc}")
    finally:
        endpoint.close()
    sys.exit(0)


@cli.command()
@click.option("--data", "data_path", required=True, type=click.Path(), help="JSONL training samples.")
@click.option("--tau", required=True, type=float, help="Background distance threshold.")
@click.option("--out", "out_path", required=True, type=click.Path(), help="Model file to write.")
@click.option("--background-label", default="background", show_default=True)
def train(data_path: str, tau: float, out_path: str, background_label: str) -> None:
    """Train a centroid model from labeled samples."""
    try:
        samples = load_samples(data_path)
    except OSError as exc:
        _fail(2, f"cannot read samples: {exc}")
    except ConfigFileError as exc:
        _fail(2, str(exc))
    try:
        model = train_centroids(samples, tau=tau, background_label=background_label)
    except (LearningError, ValueError) as exc:
        _fail(1, str(exc))
    try:
        save_model(model, out_path)
    except OSError as exc:
        _fail(2, f"cannot write model: {exc}")
    _kv("labels", ",".join(model.labels))
    _kv("dim", model.dim)
    _kv("out", out_path)
    sys.exit(0)


def _parse_osc_args(tokens: tuple[str, ...]) -> tuple:
    args: list = []
    for token in tokens:
        prefix, sep, value = token.partition(":")
        if not sep or prefix not in ("i", "f", "s"):
            raise ValueError(f"arguments look like i:42, f:0.5 or s:text, got {token!r}")
        if prefix == "i":
            args.append(int(value))
        elif prefix == "f":
            args.append(float(value))
        else:
            args.append(value)
    return tuple(args)


@cli.command("osc-send")
@click.argument("address")
@click.argument("args", nargs=-1)
@click.option("--target", "target_text", default="127.0.0.1:4560", show_default=True, help="host:port")
def osc_send(address: str, args: tuple[str, ...], target_text: str) -> None:
    """Encode one message and send it as a single datagram."""
    try:
        target = parse_target(target_text)
        message = OscMessage(address, _parse_osc_args(args))
        data = encode_packet(message)
    except (ConfigFileError, ValueError, InvariantViolation) as exc:
        _fail(1, str(exc))
    try:
        endpoint = open_endpoint("0.0.0.0", 0)
    except BindFailure as exc:
        _fail(2, str(exc))
    try:
        endpoint.send(message, target)
    except TransportError as exc:
        _fail(2, str(exc))
    finally:
        endpoint.close()
    _kv("sent_bytes", len(data))
    _kv("target", "%s:%d" % target)
    sys.exit(0)


if __name__ == "__main__":
    cli()
