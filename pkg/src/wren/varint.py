"""LEB128-style unsigned varints: 7 bits per byte, low group first, high bit continues."""

from __future__ import annotations


def encode_uvarint(value: int, out: bytearray):
    if value < 0:
        raise ValueError("varint values must be non-negative")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def decode_uvarint(buf, pos: int):
    result = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise ValueError("truncated varint")
        byte = buf[pos]
        pos += 1
        result |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return result, pos
        shift += 7
        if shift > 63:
            raise ValueError("varint too long")


def encode_deltas(values, out: bytearray):
    """Delta-encode an ascending int sequence; first value stored absolute."""
    prev = 0
    for i, value in enumerate(values):
        encode_uvarint(value if i == 0 else value - prev, out)
        prev = value


def decode_deltas(buf, pos: int, count: int):
    values = []
    prev = 0
    for i in range(count):
        delta, pos = decode_uvarint(buf, pos)
        prev = delta if i == 0 else prev + delta
        values.append(prev)
    return values, pos
