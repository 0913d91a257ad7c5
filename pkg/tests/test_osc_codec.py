"""Codec tests: golden vectors, round trips, canonical rejection."""

from __future__ import annotations

import random
import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faime.osc import (
    IMMEDIATELY,
    InvariantViolation,
    MalformedPacket,
    OscBundle,
    OscMessage,
    TimeTag,
    decode_packet,
    encode_packet,
)
from helpers import random_packet

GOLDEN_EMPTY = bytes.fromhex("2f6100002c000000")
GOLDEN_NOTE = bytes.fromhex("2f74686572616c6d696e2f6e6f7465002c666600" "43dc0000" "3f000000")
GOLDEN_STR = b"/s\x00\x00,s\x00\x00hi\x00\x00"


def test_golden_empty_message():
    assert encode_packet(OscMessage("/a")) == GOLDEN_EMPTY
    assert len(GOLDEN_EMPTY) == 8


def test_golden_note_message():
    assert encode_packet(OscMessage("/theralmin/note", (440.0, 0.5))) == GOLDEN_NOTE
    assert len(GOLDEN_NOTE) == 28


def test_golden_string_message():
    assert encode_packet(OscMessage("/s", ("hi",))) == GOLDEN_STR
    assert len(GOLDEN_STR) == 12


def test_golden_vectors_decode_back():
    assert decode_packet(GOLDEN_EMPTY) == OscMessage("/a")
    assert decode_packet(GOLDEN_NOTE) == OscMessage("/theralmin/note", (440.0, 0.5))
    assert decode_packet(GOLDEN_STR) == OscMessage("/s", ("hi",))


def test_empty_bundle_layout():
    data = encode_packet(OscBundle())
    assert data == b"#bundle\x00" + struct.pack(">II", 0, 1)
    assert decode_packet(data) == OscBundle(IMMEDIATELY, ())


def test_seven_byte_input_rejected():
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(b"\x2f\x61\x00\x00\x2c\x00\x00")
    assert exc.value.reason == "length"


def test_empty_input_rejected():
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(b"")
    assert exc.value.reason == "length"


def test_unknown_type_tag_rejected():
    mutated = bytearray(GOLDEN_EMPTY)
    assert mutated[5] == 0  # first tag slot after ','
    mutated[5] = ord("q")
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(bytes(mutated))
    assert exc.value.reason == "unknown-tag"


def test_missing_type_tag_rejected():
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(b"/a\x00\x00")
    assert exc.value.reason == "type-tag"


def test_bad_address_rejected():
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(b"a\x00\x00\x00,\x00\x00\x00")
    assert exc.value.reason == "address"


def test_nonzero_padding_rejected():
    mutated = bytearray(GOLDEN_STR)
    mutated[-1] = ord("!")  # pad byte after "hi"
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(bytes(mutated))
    assert exc.value.reason == "padding"


def test_trailing_bytes_rejected():
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(GOLDEN_EMPTY + b"\x00\x00\x00\x00")
    assert exc.value.reason in ("trailing", "padding")


def test_truncated_argument_rejected():
    # ",f" promised but no float payload
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(b"/a\x00\x00,f\x00\x00")
    assert exc.value.reason == "truncated"


def test_signaling_nan_float_rejected():
    # 7F 80 00 01 is a signaling NaN; unpacking quiets it, so these bytes
    # could never be reproduced by the encoder
    data = b"/a\x00\x00,f\x00\x00" + bytes.fromhex("7f800001")
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(data)
    assert exc.value.reason == "float"
    # the canonical quiet NaN and infinities decode fine
    for word in ("7fc00000", "7f800000", "ff800000"):
        packet = decode_packet(b"/a\x00\x00,f\x00\x00" + bytes.fromhex(word))
        assert encode_packet(packet) == b"/a\x00\x00,f\x00\x00" + bytes.fromhex(word)


def test_negative_blob_length_rejected():
    data = b"/a\x00\x00,b\x00\x00" + struct.pack(">i", -4)
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(data)
    assert exc.value.reason == "blob-size"


def test_bundle_element_size_overrun_rejected():
    inner = encode_packet(OscMessage("/a"))
    data = b"#bundle\x00" + struct.pack(">II", 0, 1) + struct.pack(">i", len(inner) + 8) + inner
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(data)
    assert exc.value.reason == "element-size"


# -- invariant violations on encode -----------------------------------------


def test_encode_rejects_bad_address():
    with pytest.raises(InvariantViolation):
        encode_packet(OscMessage("no-slash"))


def test_encode_rejects_interior_nul():
    with pytest.raises(InvariantViolation):
        encode_packet(OscMessage("/a", ("oh\x00no",)))
    with pytest.raises(InvariantViolation):
        encode_packet(OscMessage("/a\x00b"))


def test_encode_rejects_out_of_range_int():
    with pytest.raises(InvariantViolation):
        encode_packet(OscMessage("/a", (2**31,)))
    assert decode_packet(encode_packet(OscMessage("/a", (2**31 - 1,)))) == OscMessage(
        "/a", (2**31 - 1,)
    )


def test_encode_rejects_bool_and_none():
    with pytest.raises(InvariantViolation):
        encode_packet(OscMessage("/a", (True,)))
    with pytest.raises(InvariantViolation):
        encode_packet(OscMessage("/a", (None,)))


def test_encode_rejects_excessive_nesting():
    packet = OscMessage("/a")
    for _ in range(8):
        packet = OscBundle(IMMEDIATELY, (packet,))
    assert decode_packet(encode_packet(packet)) == packet
    with pytest.raises(InvariantViolation):
        encode_packet(OscBundle(IMMEDIATELY, (packet,)))


def test_decode_rejects_excessive_nesting():
    # Hand-build a 9-deep bundle, which the encoder refuses to produce.
    data = b"#bundle\x00" + struct.pack(">II", 0, 1)
    for _ in range(8):
        data = b"#bundle\x00" + struct.pack(">II", 0, 1) + struct.pack(">i", len(data)) + data
    with pytest.raises(MalformedPacket) as exc:
        decode_packet(data)
    assert exc.value.reason == "nesting"


def test_timetag_immediate():
    assert TimeTag(0, 1).raw == 1
    assert TimeTag(0, 1).is_immediate
    assert not TimeTag(0, 2).is_immediate
    assert TimeTag.from_raw(1) == IMMEDIATELY
    assert TimeTag.from_raw((3 << 32) | 7) == TimeTag(3, 7)


def test_timetag_fields_must_be_u32():
    with pytest.raises(ValueError):
        TimeTag(2**32, 0)
    with pytest.raises(ValueError):
        TimeTag(0, -1)
    TimeTag(2**32 - 1, 2**32 - 1)  # boundary is fine


# -- properties ---------------------------------------------------------------

_texts = st.text(
    alphabet=st.characters(blacklist_characters="\x00", blacklist_categories=("Cs",)),
    max_size=12,
)
_addresses = _texts.map(lambda s: "/" + s)
_args = st.one_of(
    st.integers(min_value=-(2**31), max_value=2**31 - 1),
    st.floats(width=32, allow_nan=False),
    _texts,
    st.binary(max_size=17),
)
_messages = st.builds(lambda a, xs: OscMessage(a, tuple(xs)), _addresses, st.lists(_args, max_size=6))
_timetags = st.builds(TimeTag, st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))


def _packets(depth: int):
    if depth == 0:
        return _messages
    inner = _packets(depth - 1)
    bundles = st.builds(
        lambda tt, els: OscBundle(tt, tuple(els)), _timetags, st.lists(inner, max_size=3)
    )
    return st.one_of(_messages, bundles)


@given(_packets(3))
def test_round_trip_property(packet):
    data = encode_packet(packet)
    assert len(data) % 4 == 0
    assert decode_packet(data) == packet


@given(_packets(2), st.data())
@settings(max_examples=300)
def test_single_byte_mutation_never_corrupts_silently(packet, data):
    """Decode of any 1-byte mutation either fails or is a different
    packet whose canonical encoding is exactly the mutated bytes."""
    encoded = bytearray(encode_packet(packet))
    index = data.draw(st.integers(0, len(encoded) - 1))
    newbyte = data.draw(st.integers(0, 255).filter(lambda b: b != encoded[index]))
    encoded[index] = newbyte
    mutated = bytes(encoded)
    try:
        decoded = decode_packet(mutated)
    except MalformedPacket:
        return
    assert encode_packet(decoded) == mutated


def test_seeded_fuzz_round_trip_small():
    rng = random.Random(0x05C1)
    for _ in range(500):
        packet = random_packet(rng)
        data = encode_packet(packet)
        assert len(data) % 4 == 0
        assert decode_packet(data) == packet
