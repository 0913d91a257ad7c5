"""WebSocket bridge: live steering of a running device.

Protocol (one JSON object per text frame):

    client -> server   {"type": "stimulus", "channel": "pitch", "value": 0.5}
                       {"type": "gesture", "features": [0.1, 0.9]}
    server -> client   {"type": "status", "device": "...", "version": "..."}
                       {"type": "class", "label": "...", "confidence": 0.9}
                       {"type": "osc_out", "address": "...", "args": [...], "t_us": 123}
                       {"type": "error", "reason": "..."}

The server greets each client with a status frame. Malformed frames are
answered with an error frame on that connection only; class and osc_out
frames are broadcast to every client. Inbound events are stamped with a
monotonic clock at arrival, so the scheduler itself stays clock-free.
"""

from __future__ import annotations

import asyncio
import base64
import json
import logging
import math
import time
from dataclasses import dataclass, field

from .. import __version__
from ..devices import DeviceDescriptor
from ..osc import OscMessage
from ..pipeline import ClassDecision, Control, Gesture, Scheduler, StagePanic, Stimulus, UnsortedStream
from ..transport import Endpoint, TransportError

log = logging.getLogger(__name__)

TICK_INTERVAL_MS = 10.0


@dataclass
class BridgeResult:
    """Frames produced by one inbound frame or timer tick."""

    replies: list[str] = field(default_factory=list)  # to the sender only
    broadcasts: list[str] = field(default_factory=list)  # to every client
    controls: list[Control] = field(default_factory=list)  # for the UDP wire


def _error_frame(reason: str) -> str:
    return json.dumps({"type": "error", "reason": reason})


def _json_arg(value):
    if isinstance(value, bytes):
        return {"b64": base64.b64encode(value).decode("ascii")}
    return value


def _frames_for(events) -> tuple[list[str], list[Control]]:
    frames: list[str] = []
    controls: list[Control] = []
    for event in events:
        if isinstance(event, ClassDecision):
            frames.append(
                json.dumps({"type": "class", "label": event.label, "confidence": event.confidence})
            )
        elif isinstance(event, Control):
            msg: OscMessage = event.message
            frames.append(
                json.dumps(
                    {
                        "type": "osc_out",
                        "address": msg.address,
                        "args": [_json_arg(a) for a in msg.args],
                        "t_us": event.t_us,
                    }
                )
            )
            controls.append(event)
    return frames, controls


class DeviceSession:
    """Owns one scheduler and speaks the bridge frame protocol.

    Pure frame-in/frames-out logic: no sockets, so it is directly
    testable. Pass explicit t_us values to drive logical time; without
    them, arrival time comes from a monotonic clock.
    """

    def __init__(self, descriptor: DeviceDescriptor):
        self._descriptor = descriptor
        self._scheduler = Scheduler(descriptor.graph)
        self._t0_ns = time.monotonic_ns()

    def _now_us(self) -> int:
        return (time.monotonic_ns() - self._t0_ns) // 1000

    def greeting(self) -> str:
        return json.dumps({"type": "status", "device": self._descriptor.name, "version": __version__})

    def handle_frame(self, text: str, t_us: int | None = None) -> BridgeResult:
        result = BridgeResult()
        try:
            obj = json.loads(text)
        except json.JSONDecodeError:
            result.replies.append(_error_frame("invalid JSON"))
            return result
        if not isinstance(obj, dict):
            result.replies.append(_error_frame("frame must be a JSON object"))
            return result

        stamp = self._now_us() if t_us is None else t_us
        msg_type = obj.get("type")
        if msg_type == "stimulus":
            channel = obj.get("channel")
            value = obj.get("value")
            if not isinstance(channel, str) or not channel:
                result.replies.append(_error_frame("stimulus needs a channel"))
                return result
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
                result.replies.append(_error_frame("stimulus value must be a finite number"))
                return result
            event = Stimulus(channel=channel, value=float(value), t_us=stamp)
        elif msg_type == "gesture":
            features = obj.get("features")
            if not isinstance(features, list) or not features or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)
                for v in features
            ):
                result.replies.append(_error_frame("gesture needs a list of finite numbers"))
                return result
            event = Gesture(features=tuple(float(v) for v in features), t_us=stamp)
        else:
            result.replies.append(_error_frame(f"unknown message type {msg_type!r}"))
            return result

        try:
            outputs = self._scheduler.ingest(event)
        except (UnsortedStream, StagePanic, ValueError) as exc:
            result.replies.append(_error_frame(f"event rejected: {exc}"))
            return result
        result.broadcasts, result.controls = _frames_for(outputs)
        return result

    def tick(self, t_us: int | None = None) -> BridgeResult:
        """Commit throttled output due by now (timer-driven in live mode)."""
        stamp = self._now_us() if t_us is None else t_us
        outputs = self._scheduler.advance_time(stamp)
        broadcasts, controls = _frames_for(outputs)
        return BridgeResult(broadcasts=broadcasts, controls=controls)


async def serve_bridge(
    session: DeviceSession,
    host: str,
    port: int,
    udp: Endpoint | None = None,
    udp_target: tuple[str, int] | None = None,
    on_bound=None,
) -> None:
    """Run the WS server until cancelled; one scheduler, many clients."""
    import websockets.asyncio.server

    clients: set = set()

    def dispatch(result: BridgeResult) -> list:
        chores = []
        for frame in result.broadcasts:
            chores.extend(client.send(frame) for client in clients)
        if udp is not None and udp_target is not None:
            for control in result.controls:
                try:
                    udp.send(control.message, udp_target)
                except TransportError as exc:
                    # a lost datagram must not take the bridge down
                    log.warning("dropped outbound control: %s", exc)
        return chores

    async def handler(connection):
        clients.add(connection)
        try:
            await connection.send(session.greeting())
            async for text in connection:
                if isinstance(text, bytes):
                    await connection.send(_error_frame("binary frames are not supported"))
                    continue
                result = session.handle_frame(text)
                for frame in result.replies:
                    await connection.send(frame)
                await asyncio.gather(*dispatch(result), return_exceptions=True)
        finally:
            clients.discard(connection)

    async def ticker():
        while True:
            await asyncio.sleep(TICK_INTERVAL_MS / 1000.0)
            result = session.tick()
            await asyncio.gather(*dispatch(result), return_exceptions=True)

    async with websockets.asyncio.server.serve(handler, host, port) as server:
        bound_port = server.sockets[0].getsockname()[1]
        if on_bound is not None:
            on_bound(bound_port)
        tick_task = asyncio.create_task(ticker())
        try:
            await asyncio.Future()
        finally:
            tick_task.cancel()


__all__ = ["TICK_INTERVAL_MS", "BridgeResult", "DeviceSession", "serve_bridge"]
