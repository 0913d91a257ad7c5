"""Shared test fixtures: packet fuzzers, a minimal device, trace makers."""

from __future__ import annotations

import random
import string

from faime.osc import OscBundle, OscMessage, OscPacket, TimeTag
from faime.pipeline import (
    Binding,
    Control,
    Stage,
    StageBehavior,
    StageKind,
    Stimulus,
    StimulusChannel,
    Throttle,
    ThrottleGate,
    device_graph,
)

PRINTABLE = string.ascii_letters + string.digits + "_-."


def random_message(rng: random.Random) -> OscMessage:
    address = "/" + "/".join(
        "".join(rng.choices(PRINTABLE, k=rng.randint(1, 8))) for _ in range(rng.randint(1, 3))
    )
    args = []
    for _ in range(rng.randint(0, 5)):
        kind = rng.randrange(4)
        if kind == 0:
            args.append(rng.randint(-(2**31), 2**31 - 1))
        elif kind == 1:
            # quantize to float32 so the wire round-trip is exact
            import struct

            args.append(struct.unpack(">f", struct.pack(">f", rng.uniform(-1e6, 1e6)))[0])
        elif kind == 2:
            args.append("".join(rng.choices(PRINTABLE + " ", k=rng.randint(0, 12))))
        else:
            args.append(rng.randbytes(rng.randint(0, 17)))
    return OscMessage(address, tuple(args))


def random_packet(rng: random.Random, max_depth: int = 3) -> OscPacket:
    if max_depth == 0 or rng.random() < 0.6:
        return random_message(rng)
    timetag = TimeTag(rng.randrange(2**32), rng.randrange(2**32))
    elements = tuple(random_packet(rng, max_depth - 1) for _ in range(rng.randint(0, 3)))
    return OscBundle(timetag, elements)


class LatestValueProduction(StageBehavior):
    """Minimal production: emits the latest value per channel under one
    throttled address."""

    def __init__(self, address: str = "/test/out", throttle: Throttle = Throttle()):
        self._address = address
        self._throttle = throttle
        self._gate = ThrottleGate(throttle)
        self._value = 0.0

    def reset(self) -> None:
        self._gate.reset()
        self._value = 0.0

    def on_event(self, event, ctx) -> None:
        if isinstance(event, Stimulus):
            self._value = event.value
            self._gate.request(event.t_us)

    def advance(self, now_us, ctx) -> None:
        slot = self._gate.due(now_us)
        if slot is not None:
            ctx.emit(Control(OscMessage(self._address, (self._value,)), t_us=slot))

    def flush(self, ctx) -> None:
        slot = self._gate.flush()
        if slot is not None:
            ctx.emit(Control(OscMessage(self._address, (self._value,)), t_us=slot))


class ForwardAll(StageBehavior):
    def on_event(self, event, ctx) -> None:
        ctx.forward(event)


def passthrough_graph(channel: str = "x", rate_hz: float = 100.0):
    """capture -> adaptation -> production over a single channel."""
    stages = [
        Stage("capture", StageKind.STIMULUS_CAPTURE, ForwardAll(),
              consumes=frozenset({Stimulus}), channels=frozenset({channel})),
        Stage("adapt", StageKind.STIMULUS_ADAPTATION, ForwardAll(),
              consumes=frozenset({Stimulus})),
        Stage("produce", StageKind.PRODUCTION, LatestValueProduction(throttle=Throttle(rate_hz)),
              consumes=frozenset({Stimulus})),
    ]
    edges = [("capture", "adapt"), ("adapt", "produce")]
    bindings = [Binding("level", StimulusChannel(channel))]
    return device_graph(stages, edges, bindings)
