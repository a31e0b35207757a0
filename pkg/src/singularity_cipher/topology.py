"""Twist layer: keyed per-position byte bijections and their composition.

Each twist runs three invertible stages on a byte at position ``p``::

    y = (x + (p mod 256) * stride + offset) mod 256   # positional shift
    z = perm[y]                                       # keyed substitution
    z = bitreverse8(z) if (p + phase) is odd          # orientation flip

A message is encrypted by applying twist ``k1`` and then twist ``k2`` at every
position.  With ``chain=True`` each plaintext byte is first XORed with the
previous ciphertext byte so a change propagates to the rest of the message.

Key derivation (FNV-1a 64 -> SplitMix64 -> Fisher-Yates) is reproducible
bit-for-bit but is not a password hash; keys carry at most 64 bits of entropy.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import EmptyPassphrase

MASK64 = 0xFFFFFFFFFFFFFFFF

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x00000100000001B3

GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK64
    return h


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state; return ``(new_state, output)``."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def splitmix64_stream(state: int) -> Iterator[int]:
    """Endless stream of SplitMix64 outputs starting from ``state``."""
    while True:
        state, out = splitmix64_next(state)
        yield out


@dataclass(frozen=True)
class Permutation:
    table: tuple[int, ...]
    inverse: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.table) != list(range(256)):
            raise ValueError("table is not a bijection on 0..255")
        if any(self.inverse[t] != x for x, t in enumerate(self.table)):
            raise ValueError("inverse does not undo table")

    @classmethod
    def from_table(cls, table) -> Permutation:
        table = tuple(int(v) for v in table)
        inverse = [0] * 256
        for x, t in enumerate(table):
            inverse[t] = x
        return cls(table, tuple(inverse))

    @classmethod
    def identity(cls) -> Permutation:
        return cls.from_table(range(256))


def _fisher_yates(stream: Iterator[int]) -> list[int]:
    table = list(range(256))
    for i in range(255, 0, -1):
        j = next(stream) % (i + 1)
        table[i], table[j] = table[j], table[i]
    return table


def derive_permutation(seed: int) -> Permutation:
    return Permutation.from_table(_fisher_yates(splitmix64_stream(seed & MASK64)))


@dataclass(frozen=True)
class TwistKey:
    perm: Permutation
    stride: int
    offset: int
    phase: int

    def __post_init__(self):
        if not (0 <= self.stride <= 255 and self.stride & 1):
            raise ValueError(f"stride must be odd and in 0..255, got {self.stride}")
        if not 0 <= self.offset <= 255:
            raise ValueError(f"offset must be in 0..255, got {self.offset}")
        if self.phase not in (0, 1):
            raise ValueError(f"phase must be 0 or 1, got {self.phase}")

    @classmethod
    def identity(cls) -> TwistKey:
        """Key whose twist is the identity at position 0."""
        return cls(Permutation.identity(), stride=1, offset=0, phase=0)


@dataclass(frozen=True)
class KeyPair:
    k1: TwistKey
    k2: TwistKey

    @classmethod
    def from_passphrase(cls, passphrase: bytes | str) -> KeyPair:
        if isinstance(passphrase, str):
            passphrase = passphrase.encode("utf-8")
        return cls(derive_key(passphrase, 1), derive_key(passphrase, 2))


def derive_key(passphrase: bytes, domain: int) -> TwistKey:
    """Derive one twist key from a passphrase and a domain tag (1 or 2).

    The permutation consumes the first 255 outputs of the SplitMix64 stream
    seeded with ``fnv1a64(passphrase + bytes([domain]))``; stride, offset
    and phase come from the next three outputs of the same stream.
    """
    if len(passphrase) == 0:
        raise EmptyPassphrase("passphrase must not be empty")
    if domain not in (1, 2):
        raise ValueError(f"domain must be 1 or 2, got {domain}")
    seed = fnv1a64(bytes(passphrase) + bytes([domain]))
    stream = splitmix64_stream(seed)
    perm = Permutation.from_table(_fisher_yates(stream))
    stride = (next(stream) % 256) | 1
    offset = next(stream) % 256
    phase = next(stream) % 2
    return TwistKey(perm, stride, offset, phase)


def bitreverse8(x: int) -> int:
    x = ((x & 0xF0) >> 4) | ((x & 0x0F) << 4)
    x = ((x & 0xCC) >> 2) | ((x & 0x33) << 2)
    x = ((x & 0xAA) >> 1) | ((x & 0x55) << 1)
    return x


BITREV = np.array([bitreverse8(x) for x in range(256)], dtype=np.uint8)


def twist_forward(x: int, p: int, k: TwistKey) -> int:
    y = (x + (p % 256) * k.stride + k.offset) % 256
    z = k.perm.table[y]
    if (p + k.phase) % 2 == 1:
        z = bitreverse8(z)
    return z


def twist_inverse(z: int, p: int, k: TwistKey) -> int:
    if (p + k.phase) % 2 == 1:
        z = bitreverse8(z)
    y = k.perm.inverse[z]
    return (y - (p % 256) * k.stride - k.offset) % 256


# Array forms.  A twist depends on p only through p mod 256 (the parity of p
# equals the parity of p mod 256), so the composed cipher is fully described
# by a 256 x 256 table indexed [p mod 256, symbol].

def _twist_rows(k: TwistKey) -> np.ndarray:
    p = np.arange(256, dtype=np.int64)[:, None]
    x = np.arange(256, dtype=np.int64)[None, :]
    y = (x + p * k.stride + k.offset) % 256
    z = np.asarray(k.perm.table, dtype=np.uint8)[y]
    flip = ((p + k.phase) % 2 == 1).repeat(256, axis=1)
    return np.where(flip, BITREV[z], z)


def cipher_table(K: KeyPair) -> np.ndarray:
    """``table[p % 256, x]`` is the double twist of symbol ``x`` at ``p``."""
    t1 = _twist_rows(K.k1)
    t2 = _twist_rows(K.k2)
    return np.take_along_axis(t2, t1.astype(np.intp), axis=1)


def inverse_cipher_table(K: KeyPair) -> np.ndarray:
    fwd = cipher_table(K)
    inv = np.empty_like(fwd)
    rows = np.arange(256)[:, None]
    inv[rows, fwd] = np.arange(256, dtype=np.uint8)[None, :]
    return inv


def _as_array(m) -> np.ndarray:
    return np.frombuffer(bytes(m), dtype=np.uint8)


def chain_encrypt(symbols, rows) -> bytearray:
    """Chained encryption; ``rows`` is ``cipher_table(K).tolist()``."""
    out = bytearray(len(symbols))
    prev = 0
    for p, sym in enumerate(symbols):
        prev = rows[p & 0xFF][sym ^ prev]
        out[p] = prev
    return out


def encrypt_symbols(m: bytes, K: KeyPair, chain: bool = False) -> bytes:
    x = _as_array(m)
    if x.size == 0:
        return b""
    table = cipher_table(K)
    if chain:
        return bytes(chain_encrypt(x.tolist(), table.tolist()))
    return table[np.arange(x.size) % 256, x].tobytes()


def decrypt_symbols(c: bytes, K: KeyPair, chain: bool = False) -> bytes:
    y = _as_array(c)
    if y.size == 0:
        return b""
    pos = np.arange(y.size) % 256
    x = inverse_cipher_table(K)[pos, y]
    if chain:
        prev = np.concatenate(([0], y[:-1])).astype(np.uint8)
        x = x ^ prev
    return x.tobytes()
