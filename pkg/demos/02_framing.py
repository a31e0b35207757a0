"""Bytes become a length-prefixed bit stream and back."""
from singularity_cipher import from_bitstream, to_bitstream

bs = to_bitstream(b"\x80\x01")
print("bits:", "".join(map(str, bs.bits.tolist())))
print("declared length:", bs.declared_length)
print("total bits:", len(bs), "= 32 + 8 * 2")
print("decoded:", from_bitstream(bs))

empty = to_bitstream(b"")
print("empty input gives", len(empty), "header bits, all zero:", not empty.bits.any())
