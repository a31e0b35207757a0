"""Byte <-> framed bit stream conversion.

Frame layout: a 32-bit big-endian byte count followed by the payload bits,
each byte most-significant bit first.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, MalformedHeader, Oversize

HEADER_BITS = 32


@dataclass(frozen=True, eq=False)
class BitStream:
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if np.any(bits > 1):
            raise ValueError("bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return self.bits.size

    def __eq__(self, other):
        if not isinstance(other, BitStream):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    @property
    def declared_length(self) -> int:
        if self.bits.size < HEADER_BITS:
            raise MalformedHeader(f"need {HEADER_BITS} header bits, have {self.bits.size}")
        return int.from_bytes(np.packbits(self.bits[:HEADER_BITS]).tobytes(), "big")


def to_bitstream(data: bytes) -> BitStream:
    n = len(data)
    if n >= 1 << 32:
        raise Oversize(f"payload of {n} bytes does not fit a 32-bit header")
    framed = n.to_bytes(4, "big") + bytes(data)
    return BitStream(np.unpackbits(np.frombuffer(framed, dtype=np.uint8)))


def from_bitstream(bs: BitStream) -> bytes:
    n = bs.declared_length
    expected = HEADER_BITS + 8 * n
    if len(bs) != expected:
        raise LengthMismatch(f"header declares {n} bytes ({expected} bits), stream has {len(bs)} bits")
    return np.packbits(bs.bits[HEADER_BITS:]).tobytes()
