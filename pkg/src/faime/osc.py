"""OSC 1.0 wire codec and address pattern matching.

Wire layout (big-endian throughout, every packet a multiple of 4 bytes):

    message  = address-string  type-tag-string  arg*
    string   = ascii/utf-8 bytes  NUL  pad-to-4 (pad bytes are NUL)
    int32    = 4 bytes two's complement
    float32  = 4 bytes IEEE-754 single
    blob     = int32 length  payload  pad-to-4 (pad bytes are NUL)
    bundle   = "#bundle\\0"  timetag(8)  (int32 size  packet)*

Supported argument types are the four OSC 1.0 core tags: i, f, s, b,
mapped to int, float, str, bytes. Floats are quantized to single
precision on the wire; ints must fit in a signed 32-bit word.

The decoder is strict and canonical: it accepts exactly the byte strings
this encoder can produce (type-tag string required, pad bytes must be
NUL, no trailing bytes) and raises MalformedPacket for everything else.
Hence decode(encode(p)) == p and encode(decode(b)) == b.

All values are immutable; every function here is pure and thread-safe.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

MAX_BUNDLE_DEPTH = 8

OscArg = int | float | str | bytes


class OscError(Exception):
    """Base class for all OSC codec errors."""


class InvariantViolation(OscError):
    """A packet under encode breaks a type invariant (bad address,
    interior NUL, out-of-range int, excessive bundle nesting)."""


class MalformedPacket(OscError):
    """Bytes under decode are not a canonical OSC packet.

    `reason` is a stable short code: one of "length", "address",
    "type-tag", "unknown-tag", "truncated", "element-size", "padding",
    "string", "float", "blob-size", "trailing", "nesting".
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"malformed packet ({reason})" + (f": {detail}" if detail else ""))


class BadPattern(OscError):
    """Address pattern is syntactically invalid (unterminated '[' or '{')."""


@dataclass(frozen=True, slots=True)
class OscMessage:
    """A single OSC message: an address plus an ordered argument tuple."""

    address: str
    args: tuple[OscArg, ...] = ()

    def type_tags(self) -> str:
        """Type-tag string derived from the arguments, ','-prefixed."""
        return "," + "".join(_tag_for(a) for a in self.args)


@dataclass(frozen=True, slots=True)
class TimeTag:
    """NTP-style 64-bit timestamp: seconds since 1900 plus a 1/2^32 fraction.

    The raw value 1 (seconds=0, fraction=1) means "immediate".
    """

    seconds: int = 0
    fraction: int = 1

    def __post_init__(self):
        if not (0 <= self.seconds < 2**32 and 0 <= self.fraction < 2**32):
            raise ValueError(f"timetag fields must be unsigned 32-bit, got {self.seconds}/{self.fraction}")

    @property
    def raw(self) -> int:
        return (self.seconds << 32) | self.fraction

    @classmethod
    def from_raw(cls, raw: int) -> TimeTag:
        return cls(seconds=(raw >> 32) & 0xFFFFFFFF, fraction=raw & 0xFFFFFFFF)

    @property
    def is_immediate(self) -> bool:
        return self.raw == 1


IMMEDIATELY = TimeTag(0, 1)


@dataclass(frozen=True, slots=True)
class OscBundle:
    """A timetagged, possibly empty sequence of packets (nesting <= 8)."""

    timetag: TimeTag = IMMEDIATELY
    elements: tuple[OscPacket, ...] = field(default=())


OscPacket = OscMessage | OscBundle


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------


def _tag_for(arg: OscArg) -> str:
    # bool is an int subclass but has no OSC core tag; reject explicitly.
    if isinstance(arg, bool):
        raise InvariantViolation(f"unsupported argument type: bool ({arg!r})")
    if isinstance(arg, int):
        return "i"
    if isinstance(arg, float):
        return "f"
    if isinstance(arg, str):
        return "s"
    if isinstance(arg, (bytes, bytearray)):
        return "b"
    raise InvariantViolation(f"unsupported argument type: {type(arg).__name__}")


def _encode_string(s: str, what: str) -> bytes:
    if "\x00" in s:
        raise InvariantViolation(f"{what} contains an interior NUL")
    try:
        raw = s.encode("utf-8")
    except UnicodeEncodeError as exc:
        raise InvariantViolation(f"{what} is not encodable: {exc}") from None
    raw += b"\x00"
    return raw + b"\x00" * ((4 - len(raw) % 4) % 4)


def _encode_message(msg: OscMessage) -> bytes:
    if not msg.address.startswith("/"):
        raise InvariantViolation(f"address must start with '/': {msg.address!r}")
    parts = [_encode_string(msg.address, "address"), _encode_string(msg.type_tags(), "type tags")]
    for arg in msg.args:
        tag = _tag_for(arg)
        if tag == "i":
            if not -(2**31) <= arg < 2**31:
                raise InvariantViolation(f"int argument out of int32 range: {arg}")
            parts.append(struct.pack(">i", arg))
        elif tag == "f":
            parts.append(struct.pack(">f", arg))
        elif tag == "s":
            parts.append(_encode_string(arg, "string argument"))
        else:
            blob = bytes(arg)
            if len(blob) >= 2**31:
                raise InvariantViolation("blob too large for int32 length")
            parts.append(struct.pack(">i", len(blob)))
            parts.append(blob + b"\x00" * ((4 - len(blob) % 4) % 4))
    return b"".join(parts)


def _encode_bundle(bundle: OscBundle, depth: int) -> bytes:
    if depth > MAX_BUNDLE_DEPTH:
        raise InvariantViolation(f"bundle nesting exceeds {MAX_BUNDLE_DEPTH}")
    parts = [b"#bundle\x00", struct.pack(">II", bundle.timetag.seconds, bundle.timetag.fraction)]
    for element in bundle.elements:
        payload = _encode(element, depth)
        parts.append(struct.pack(">i", len(payload)))
        parts.append(payload)
    return b"".join(parts)


def _encode(packet: OscPacket, depth: int) -> bytes:
    if isinstance(packet, OscMessage):
        return _encode_message(packet)
    if isinstance(packet, OscBundle):
        return _encode_bundle(packet, depth + 1)
    raise InvariantViolation(f"not an OscPacket: {type(packet).__name__}")


def encode_packet(packet: OscPacket) -> bytes:
    """Encode a message or bundle to its canonical wire bytes.

    Raises InvariantViolation if the packet breaks a type invariant.
    The result length is always a multiple of 4.
    """
    return _encode(packet, 0)


# ---------------------------------------------------------------------------
# Decoding
# ---------------------------------------------------------------------------


def _read_string(data: bytes, offset: int, what: str) -> tuple[str, int]:
    end = data.find(b"\x00", offset)
    if end < 0:
        raise MalformedPacket("string", f"unterminated {what}")
    padded_end = end + 1 + (4 - (end + 1 - offset) % 4) % 4
    if padded_end > len(data):
        raise MalformedPacket("truncated", f"{what} padding runs past end")
    if data[end:padded_end].count(0) != padded_end - end:
        raise MalformedPacket("padding", f"non-NUL pad byte after {what}")
    try:
        text = data[offset:end].decode("utf-8")
    except UnicodeDecodeError:
        raise MalformedPacket("string", f"{what} is not valid UTF-8") from None
    return text, padded_end


def _decode_message(data: bytes) -> OscMessage:
    address, offset = _read_string(data, 0, "address")
    if not address.startswith("/"):
        raise MalformedPacket("address", f"address does not start with '/': {address!r}")
    if offset >= len(data) or data[offset] != 0x2C:
        raise MalformedPacket("type-tag", "missing ','-prefixed type-tag string")
    tags, offset = _read_string(data, offset, "type tags")
    args: list[OscArg] = []
    for tag in tags[1:]:
        if tag == "i":
            if offset + 4 > len(data):
                raise MalformedPacket("truncated", "int32 argument")
            args.append(struct.unpack_from(">i", data, offset)[0])
            offset += 4
        elif tag == "f":
            if offset + 4 > len(data):
                raise MalformedPacket("truncated", "float32 argument")
            value = struct.unpack_from(">f", data, offset)[0]
            # exotic NaN payloads don't survive the float32->double->float32
            # trip; reject them so decoding stays the exact inverse of
            # encoding (every other bit pattern round-trips losslessly)
            if struct.pack(">f", value) != data[offset : offset + 4]:
                raise MalformedPacket("float", "non-canonical float32 bit pattern")
            args.append(value)
            offset += 4
        elif tag == "s":
            if offset >= len(data):
                raise MalformedPacket("truncated", "string argument")
            value, offset = _read_string(data, offset, "string argument")
            args.append(value)
        elif tag == "b":
            if offset + 4 > len(data):
                raise MalformedPacket("truncated", "blob length")
            size = struct.unpack_from(">i", data, offset)[0]
            offset += 4
            if size < 0:
                raise MalformedPacket("blob-size", f"negative blob length {size}")
            padded = size + (4 - size % 4) % 4
            if offset + padded > len(data):
                raise MalformedPacket("truncated", "blob payload")
            if data[offset + size : offset + padded].count(0) != padded - size:
                raise MalformedPacket("padding", "non-NUL pad byte after blob")
            args.append(data[offset : offset + size])
            offset += padded
        else:
            raise MalformedPacket("unknown-tag", f"type tag {tag!r}")
    if offset != len(data):
        raise MalformedPacket("trailing", f"{len(data) - offset} bytes after last argument")
    return OscMessage(address, tuple(args))


def _decode_bundle(data: bytes, depth: int) -> OscBundle:
    if depth > MAX_BUNDLE_DEPTH:
        raise MalformedPacket("nesting", f"bundle nesting exceeds {MAX_BUNDLE_DEPTH}")
    if len(data) < 16:
        raise MalformedPacket("truncated", "bundle shorter than header + timetag")
    seconds, fraction = struct.unpack_from(">II", data, 8)
    elements: list[OscPacket] = []
    offset = 16
    while offset < len(data):
        size = struct.unpack_from(">i", data, offset)[0]
        offset += 4
        if size < 0:
            raise MalformedPacket("element-size", f"negative element size {size}")
        if offset + size > len(data):
            raise MalformedPacket("element-size", "element size runs past bundle end")
        elements.append(_decode(data[offset : offset + size], depth))
        offset += size
    return OscBundle(TimeTag(seconds, fraction), tuple(elements))


def _decode(data: bytes, depth: int) -> OscPacket:
    if len(data) == 0 or len(data) % 4 != 0:
        raise MalformedPacket("length", f"{len(data)} bytes is not a positive multiple of 4")
    if data.startswith(b"#bundle\x00"):
        return _decode_bundle(data, depth + 1)
    return _decode_message(data)


def decode_packet(data: bytes) -> OscPacket:
    """Decode wire bytes into a message or bundle.

    Exact inverse of encode_packet on its image; any other input raises
    MalformedPacket with a stable `reason` code.
    """
    return _decode(bytes(data), 0)


# ---------------------------------------------------------------------------
# Address pattern matching
# ---------------------------------------------------------------------------


def _check_pattern_syntax(pattern: str) -> None:
    i = 0
    while i < len(pattern):
        c = pattern[i]
        if c == "[":
            end = pattern.find("]", i + 1)
            if end < 0:
                raise BadPattern(f"unterminated '[' at index {i}")
            i = end + 1
        elif c == "{":
            end = pattern.find("}", i + 1)
            if end < 0:
                raise BadPattern(f"unterminated '{{' at index {i}")
            i = end + 1
        else:
            i += 1


def _class_matches(spec: str, ch: str) -> bool:
    negate = spec.startswith("!")
    if negate:
        spec = spec[1:]
    hit = False
    i = 0
    while i < len(spec):
        if i + 2 < len(spec) and spec[i + 1] == "-":
            if spec[i] <= ch <= spec[i + 2]:
                hit = True
            i += 3
        else:
            if spec[i] == ch:
                hit = True
            i += 1
    return hit != negate


def _match_part(pat: str, pi: int, s: str, si: int) -> bool:
    while pi < len(pat):
        c = pat[pi]
        if c == "*":
            pi += 1
            return any(_match_part(pat, pi, s, k) for k in range(si, len(s) + 1))
        if c == "?":
            if si >= len(s):
                return False
            pi += 1
            si += 1
        elif c == "[":
            end = pat.index("]", pi + 1)
            if si >= len(s) or not _class_matches(pat[pi + 1 : end], s[si]):
                return False
            pi = end + 1
            si += 1
        elif c == "{":
            end = pat.index("}", pi + 1)
            return any(
                s.startswith(alt, si) and _match_part(pat, end + 1, s, si + len(alt))
                for alt in pat[pi + 1 : end].split(",")
            )
        else:
            if si >= len(s) or s[si] != c:
                return False
            pi += 1
            si += 1
    return si == len(s)


def match_address(pattern: str, address: str) -> bool:
    """Match an OSC 1.0 address pattern against a literal address.

    '?' matches one character, '*' a run of characters, '[a-z]'/'[!..]'
    a character class, '{foo,bar}' an alternation; none of them ever
    match '/'. Raises BadPattern on unterminated '[' or '{', ValueError
    if the address does not start with '/'.
    """
    if not pattern.startswith("/"):
        raise BadPattern("pattern must start with '/'")
    if not address.startswith("/"):
        raise ValueError(f"address must start with '/': {address!r}")
    _check_pattern_syntax(pattern)
    pat_parts = pattern.split("/")
    addr_parts = address.split("/")
    if len(pat_parts) != len(addr_parts):
        return False
    return all(_match_part(p, 0, s, 0) for p, s in zip(pat_parts, addr_parts))


__all__ = [
    "OscArg",
    "OscMessage",
    "OscBundle",
    "OscPacket",
    "TimeTag",
    "IMMEDIATELY",
    "MAX_BUNDLE_DEPTH",
    "OscError",
    "InvariantViolation",
    "MalformedPacket",
    "BadPattern",
    "encode_packet",
    "decode_packet",
    "match_address",
]
