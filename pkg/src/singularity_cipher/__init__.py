"""Twist-permutation cipher whose ciphertext is drawn as triangle /
missing-square glyphs in an SVG image."""

from .analysis import AnalysisReport, analyze, avalanche_ratio, chi_square_uniformity, hamming, keyspace_bits
from .codec import BitStream, from_bitstream, to_bitstream
from .errors import *  # noqa: F401,F403
from .paradox import (
    CipherImage,
    Glyph,
    assemble_image,
    decode_bits,
    glyph_one,
    glyph_zero,
    parse_svg,
    polygon_area,
    render_svg,
    scale_document,
)
from .topology import (
    KeyPair,
    Permutation,
    TwistKey,
    bitreverse8,
    decrypt_symbols,
    derive_key,
    derive_permutation,
    encrypt_symbols,
    fnv1a64,
    splitmix64_next,
    twist_forward,
    twist_inverse,
)


def encrypt_to_svg(data: bytes, passphrase, columns: int = 16, chain: bool = False) -> str:
    """Full encryption pipeline: bytes -> cipher image document."""
    K = KeyPair.from_passphrase(passphrase)
    return render_svg(assemble_image(to_bitstream(encrypt_symbols(data, K, chain)), columns))


def decrypt_from_svg(doc: str, passphrase, chain: bool = False) -> bytes:
    """Full decryption pipeline: cipher image document -> bytes."""
    K = KeyPair.from_passphrase(passphrase)
    return decrypt_symbols(from_bitstream(decode_bits(parse_svg(doc))), K, chain)
