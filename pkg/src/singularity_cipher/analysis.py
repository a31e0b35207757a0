"""Measurements of the cipher's statistical behaviour.

Nothing here asserts a security property; the functions report numbers
(avalanche, byte-histogram chi-square, nominal key space) that callers can
compare with whatever threshold they care about.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InsufficientData, LengthMismatch
from .topology import (
    GOLDEN_GAMMA,
    MASK64,
    KeyPair,
    chain_encrypt,
    cipher_table,
    encrypt_symbols,
    splitmix64_next,
    splitmix64_stream,
)

POPCOUNT = np.array([bin(v).count("1") for v in range(256)], dtype=np.int64)

CHI_SQUARE_DF = 255
MIN_CHI_SQUARE_BYTES = 2560

# Upper bound on distinct derived KeyPairs: two 64-bit FNV seeds.
DERIVED_KEY_BITS = 128.0


def hamming(a: bytes, b: bytes) -> int:
    if len(a) != len(b):
        raise LengthMismatch(f"lengths differ: {len(a)} != {len(b)}")
    x = np.frombuffer(bytes(a), dtype=np.uint8) ^ np.frombuffer(bytes(b), dtype=np.uint8)
    return int(POPCOUNT[x].sum())


class Avalanche(NamedTuple):
    mean: float
    stddev: float
    trials: int


def avalanche_trials(trials: int, seed: int, length: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Random messages and flipped-bit indices for ``trials`` trials.

    Trial ``t`` starts its own SplitMix64 stream from the ``t``-th output of
    the stream seeded with ``seed`` (reached directly by jumping the state to
    ``seed + t * gamma``), so trials are independent of each other and of
    evaluation order.  ``ceil(length / 8)`` outputs give the message bytes
    (little-endian), one more gives the bit index modulo ``8 * length``.
    """
    words = -(-length // 8)
    msgs = np.empty((trials, length), dtype=np.uint8)
    bits = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        _, trial_state = splitmix64_next((seed + t * GOLDEN_GAMMA) & MASK64)
        stream = splitmix64_stream(trial_state)
        raw = b"".join(next(stream).to_bytes(8, "little") for _ in range(words))
        msgs[t] = np.frombuffer(raw[:length], dtype=np.uint8)
        bits[t] = next(stream) % (8 * length)
    return msgs, bits


def avalanche_distances(K: KeyPair, chain: bool, trials: int, seed: int, length: int = 64) -> np.ndarray:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if length < 1:
        raise ValueError("length must be >= 1")
    msgs, bits = avalanche_trials(trials, seed, length)
    flipped = msgs.copy()
    rows = np.arange(trials)
    byte_idx = bits // 8
    flipped[rows, byte_idx] ^= (0x80 >> (bits % 8)).astype(np.uint8)

    table = cipher_table(K)
    if not chain:
        # per-symbol cipher: only the flipped byte can change
        pos = byte_idx % 256
        diff = table[pos, msgs[rows, byte_idx]] ^ table[pos, flipped[rows, byte_idx]]
        return POPCOUNT[diff]
    table_rows = table.tolist()
    out = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        a = chain_encrypt(msgs[t].tolist(), table_rows)
        b = chain_encrypt(flipped[t].tolist(), table_rows)
        out[t] = hamming(a, b)
    return out


def avalanche_ratio(K: KeyPair, chain: bool = False, trials: int = 10_000, seed: int = 0,
                    length: int = 64) -> Avalanche:
    """Mean and population std-dev of output bits changed by one input-bit flip.

    With ``chain=False`` the distance is taken over the affected byte only;
    with ``chain=True`` over the whole message.
    """
    d = avalanche_distances(K, chain, trials, seed, length).astype(np.float64)
    return Avalanche(float(d.mean()), float(d.std()), trials)


def chi_square_uniformity(data: bytes) -> tuple[float, int]:
    n = len(data)
    if n < MIN_CHI_SQUARE_BYTES:
        raise InsufficientData(f"need at least {MIN_CHI_SQUARE_BYTES} bytes, got {n}")
    counts = np.bincount(np.frombuffer(bytes(data), dtype=np.uint8), minlength=256)
    expected = n / 256
    return float(((counts - expected) ** 2).sum() / expected), CHI_SQUARE_DF


def keyspace_bits(n: int) -> float:
    """log2 of ``(n!)**2``, summed term by term."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 2 * math.fsum(math.log2(i) for i in range(2, n + 1))


@dataclass(frozen=True)
class AnalysisReport:
    avalanche_mean: float
    avalanche_stddev: float
    chi_square: float
    chi_square_df: int
    keyspace_bits: float
    trials: int
    derived_key_bits: float = DERIVED_KEY_BITS

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.chi_square < 0:
            raise ValueError("chi_square must be >= 0")

    def to_text(self) -> str:
        return (
            f"avalanche_mean={self.avalanche_mean:.6f}\n"
            f"avalanche_stddev={self.avalanche_stddev:.6f}\n"
            f"chi_square={self.chi_square:.6f}\n"
            f"chi_square_df={self.chi_square_df}\n"
            f"keyspace_bits={self.keyspace_bits:.6f}\n"
            f"trials={self.trials}\n"
            f"derived_key_bits={self.derived_key_bits:.6f}\n"
        )

    @classmethod
    def from_text(cls, text: str) -> AnalysisReport:
        fields = dict(line.split("=", 1) for line in text.splitlines() if "=" in line)
        return cls(
            avalanche_mean=float(fields["avalanche_mean"]),
            avalanche_stddev=float(fields["avalanche_stddev"]),
            chi_square=float(fields["chi_square"]),
            chi_square_df=int(fields["chi_square_df"]),
            keyspace_bits=float(fields["keyspace_bits"]),
            trials=int(fields["trials"]),
            derived_key_bits=float(fields.get("derived_key_bits", DERIVED_KEY_BITS)),
        )


def analyze(K: KeyPair, chain: bool = False, trials: int = 10_000, seed: int = 0,
            length: int = 64, sample_bytes: int = 65_536, fill: int = 0x41) -> AnalysisReport:
    av = avalanche_ratio(K, chain, trials, seed, length)
    stat, df = chi_square_uniformity(encrypt_symbols(bytes([fill]) * sample_bytes, K, chain))
    return AnalysisReport(av.mean, av.stddev, stat, df, keyspace_bits(256), trials)
