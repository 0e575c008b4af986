"""Bit-packed I/O primitives: LSB-first bit streams, LEB varints, Golomb-Rice codes.

All multi-byte integers in the container format are little-endian; bit
streams fill each byte starting at bit 0.
"""

from __future__ import annotations

import struct


class FormatError(ValueError):
    """Malformed serialized data; carries the byte/bit offset of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


def encode_varint(value: int) -> bytes:
    """Unsigned LEB128: 7 payload bits per byte, high bit = continuation."""
    if value < 0:
        raise ValueError("varint is unsigned")
    out = bytearray()
    while True:
        part = value & 0x7F
        value >>= 7
        out.append(part | (0x80 if value else 0))
        if not value:
            return bytes(out)


def decode_varint(data: bytes, offset: int) -> tuple[int, int]:
    """Return (value, next_offset)."""
    value = 0
    shift = 0
    pos = offset
    while True:
        if pos >= len(data):
            raise FormatError("truncated varint", pos)
        byte = data[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7
        if shift > 70:
            raise FormatError("varint too long", offset)


class BitWriter:
    """Append-only LSB-first bit stream."""

    def __init__(self):
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, width: int) -> None:
        if width < 0 or value < 0 or (width < value.bit_length()):
            raise ValueError(f"value {value} does not fit in {width} bits")
        self._acc |= value << self._nbits
        self._nbits += width

    def write_unary(self, q: int) -> None:
        # q zeros terminated by a one
        self.write(1 << q, q + 1)

    def write_rice(self, value: int, k: int) -> None:
        self.write_unary(value >> k)
        if k:
            self.write(value & ((1 << k) - 1), k)

    @property
    def bit_length(self) -> int:
        return self._nbits

    def to_bytes(self) -> bytes:
        return self._acc.to_bytes((self._nbits + 7) // 8, "little")


class BitReader:
    """LSB-first bit stream reader over a bytes object."""

    def __init__(self, data: bytes, bit_offset: int = 0):
        self._data = data
        self.pos = bit_offset

    def read(self, width: int) -> int:
        end = self.pos + width
        if end > 8 * len(self._data):
            raise FormatError("truncated bit stream", self.pos)
        first, last = self.pos // 8, (end + 7) // 8
        chunk = int.from_bytes(self._data[first:last], "little")
        value = (chunk >> (self.pos & 7)) & ((1 << width) - 1)
        self.pos = end
        return value

    def read_unary(self) -> int:
        q = 0
        while True:
            if self.read(1):
                return q
            q += 1
            if q > 1 << 20:
                raise FormatError("runaway unary code", self.pos)

    def read_rice(self, k: int) -> int:
        q = self.read_unary()
        return (q << k) | (self.read(k) if k else 0)


def rice_cost(values, k: int) -> int:
    """Total bits to Rice-code *values* with parameter k."""
    return sum((v >> k) + 1 + k for v in values)


def best_rice_k(values, max_k: int = 40) -> int:
    """Exact-minimum Rice parameter for a value list (0 for an empty list)."""
    if not values:
        return 0
    best_k, best = 0, rice_cost(values, 0)
    for k in range(1, max_k + 1):
        cost = rice_cost(values, k)
        if cost < best:
            best_k, best = k, cost
    return best_k


MAGIC = b"MPH1"
VERSION = 1

TAG_BASE_CASE = 1
TAG_FLAT = 2
TAG_COLORING = 3
TAG_DIFF_RETRIEVAL = 4

_HEADER = struct.Struct("<4sHBQ")


def wrap_section(tag: int, payload: bytes) -> bytes:
    """Container: magic, u16 version, u8 tag, u64 payload length, payload."""
    return _HEADER.pack(MAGIC, VERSION, tag, len(payload)) + payload


def unwrap_section(data: bytes) -> tuple[int, bytes]:
    if len(data) < _HEADER.size:
        raise FormatError("truncated container header", len(data))
    magic, version, tag, length = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError("bad magic", 0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", 4)
    if len(data) < _HEADER.size + length:
        raise FormatError("truncated payload", len(data))
    return tag, data[_HEADER.size:_HEADER.size + length]
