"""UDP endpoints carrying one OSC packet per datagram.

An Endpoint wraps a bound UDP socket. Outbound packets are encoded and
sent as single datagrams (<= 65507 bytes, the UDP payload ceiling).
Inbound datagrams that fail to decode are counted and dropped with a
log record; they are never surfaced to callers, so a live device keeps
running through wire garbage.

One consumer may poll an endpoint at a time; sending concurrently with
polling is safe.
"""

from __future__ import annotations

import logging
import select
import socket

from .osc import MalformedPacket, OscPacket, decode_packet, encode_packet

log = logging.getLogger(__name__)

MAX_DATAGRAM = 65507


class TransportError(Exception):
    """Base class for transport errors."""


class BindFailure(TransportError):
    """The requested local address could not be bound."""


class SendFailure(TransportError):
    """The OS refused an outbound datagram."""


class OversizePacket(TransportError):
    """Encoded packet exceeds the UDP payload ceiling."""


class Endpoint:
    """A bound UDP socket speaking one OSC packet per datagram."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        self._sock = socket.socket(socket.AF_INET, socket.SOCK_DGRAM)
        try:
            self._sock.bind((host, port))
        except OSError as exc:
            self._sock.close()
            raise BindFailure(f"cannot bind {host}:{port}: {exc}") from exc
        self._sock.setblocking(False)
        self.datagrams_sent = 0
        self.datagrams_received = 0
        self.decode_failures = 0

    @property
    def local_addr(self) -> tuple[str, int]:
        return self._sock.getsockname()

    @property
    def port(self) -> int:
        return self._sock.getsockname()[1]

    def send(self, packet: OscPacket, dest: tuple[str, int]) -> None:
        """Encode and dispatch one packet as a single datagram."""
        data = encode_packet(packet)
        if len(data) > MAX_DATAGRAM:
            raise OversizePacket(f"{len(data)} bytes exceeds UDP limit of {MAX_DATAGRAM}")
        try:
            self._sock.sendto(data, dest)
        except OSError as exc:
            raise SendFailure(f"sendto {dest[0]}:{dest[1]} failed: {exc}") from exc
        self.datagrams_sent += 1

    def poll(self, timeout_ms: float = 0.0) -> list[tuple[OscPacket, tuple[str, int]]]:
        """Return all queued decodable datagrams as (packet, source) pairs.

        Waits up to `timeout_ms` for the first datagram, then drains the
        queue without waiting. Undecodable datagrams bump
        `decode_failures` and are dropped. An expired timeout returns [].
        """
        results: list[tuple[OscPacket, tuple[str, int]]] = []
        wait = max(timeout_ms, 0.0) / 1000.0
        while True:
            ready, _, _ = select.select([self._sock], [], [], wait)
            if not ready:
                return results
            wait = 0.0
            try:
                data, source = self._sock.recvfrom(65536)
            except BlockingIOError:
                return results
            self.datagrams_received += 1
            try:
                results.append((decode_packet(data), source))
            except MalformedPacket as exc:
                self.decode_failures += 1
                log.warning("dropped undecodable datagram from %s:%s: %s", source[0], source[1], exc)

    def close(self) -> None:
        self._sock.close()

    def __enter__(self) -> Endpoint:
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def open_endpoint(host: str = "127.0.0.1", port: int = 0) -> Endpoint:
    """Bind a UDP endpoint; port 0 picks an ephemeral port."""
    return Endpoint(host, port)


__all__ = [
    "MAX_DATAGRAM",
    "TransportError",
    "BindFailure",
    "SendFailure",
    "OversizePacket",
    "Endpoint",
    "open_endpoint",
]
