"""Command-line front end: ``singcipher encrypt|decrypt|analyze``.

Exit codes: 0 success, 1 bad arguments, 2 I/O failure, 3 empty passphrase,
4 undecodable cipher image.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .analysis import analyze
from .codec import from_bitstream, to_bitstream
from .errors import DecodeError, EmptyPassphrase
from .paradox import assemble_image, decode_bits, parse_svg, render_svg
from .topology import MASK64, KeyPair, decrypt_symbols, encrypt_symbols

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_PASSPHRASE = 3
EXIT_DECODE = 4

KEY_ENV = "SINGCIPHER_KEY"
DEFAULT_ANALYSIS_KEY = "singularity"

_LIMITATIONS = (
    "There is no authentication tag: decrypting with the wrong passphrase "
    "silently produces wrong bytes. Key derivation is not a password hash."
)


@dataclass
class CliConfig:
    command: str
    passphrase: Optional[str] = None
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    columns: int = 16
    chain: bool = False
    trials: int = 10_000
    seed: int = 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v <= MASK64:
        raise argparse.ArgumentTypeError("must fit in 64 bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="singcipher", description=__doc__.splitlines()[0], epilog=_LIMITATIONS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, io):
        p.add_argument("--key", dest="passphrase", help=f"passphrase (default: ${KEY_ENV})")
        if io:
            p.add_argument("--in", dest="input_path", type=Path, required=True)
            p.add_argument("--out", dest="output_path", type=Path, required=True)
        p.add_argument("--columns", type=_positive, default=16, help="glyphs per row")
        p.add_argument("--chain", action="store_true", help="chain each byte to the previous ciphertext byte")
        p.add_argument("--trials", type=_positive, default=10_000)
        p.add_argument("--seed", type=_u64, default=0)

    common(sub.add_parser("encrypt", help="bytes -> SVG cipher image", epilog=_LIMITATIONS), io=True)
    common(sub.add_parser("decrypt", help="SVG cipher image -> bytes", epilog=_LIMITATIONS), io=True)
    common(sub.add_parser("analyze", help="print avalanche / chi-square / key-space report"), io=False)
    return parser


def parse_config(argv=None, environ=None) -> CliConfig:
    environ = os.environ if environ is None else environ
    ns = build_parser().parse_args(argv)
    cfg = CliConfig(**vars(ns))
    if cfg.passphrase is None:
        cfg.passphrase = environ.get(KEY_ENV)
    return cfg


def _err(msg: str) -> None:
    print(f"singcipher: {msg}", file=sys.stderr)


def _keys(cfg: CliConfig) -> KeyPair:
    return KeyPair.from_passphrase(cfg.passphrase)


def run_encrypt(cfg: CliConfig) -> int:
    try:
        K = _keys(cfg)
    except EmptyPassphrase as e:
        _err(str(e))
        return EXIT_PASSPHRASE
    try:
        data = cfg.input_path.read_bytes()
    except OSError as e:
        _err(f"cannot read {cfg.input_path}: {e}")
        return EXIT_IO
    doc = render_svg(assemble_image(to_bitstream(encrypt_symbols(data, K, cfg.chain)), cfg.columns))
    try:
        cfg.output_path.write_text(doc, encoding="ascii")
    except OSError as e:
        _err(f"cannot write {cfg.output_path}: {e}")
        return EXIT_IO
    return EXIT_OK


def run_decrypt(cfg: CliConfig) -> int:
    try:
        K = _keys(cfg)
    except EmptyPassphrase as e:
        _err(str(e))
        return EXIT_PASSPHRASE
    try:
        doc = cfg.input_path.read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        _err(f"{cfg.input_path} is not a text document: {e}")
        return EXIT_DECODE
    except OSError as e:
        _err(f"cannot read {cfg.input_path}: {e}")
        return EXIT_IO
    try:
        ciphertext = from_bitstream(decode_bits(parse_svg(doc)))
    except DecodeError as e:
        _err(f"cannot decode {cfg.input_path}: {e}")
        return EXIT_DECODE
    try:
        cfg.output_path.write_bytes(decrypt_symbols(ciphertext, K, cfg.chain))
    except OSError as e:
        _err(f"cannot write {cfg.output_path}: {e}")
        return EXIT_IO
    return EXIT_OK


def run_analyze(cfg: CliConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        K = KeyPair.from_passphrase(cfg.passphrase or DEFAULT_ANALYSIS_KEY)
    except EmptyPassphrase as e:
        _err(str(e))
        return EXIT_PASSPHRASE
    report = analyze(K, chain=cfg.chain, trials=cfg.trials, seed=cfg.seed)
    out.write(report.to_text())
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    if cfg.command in ("encrypt", "decrypt") and cfg.passphrase is None:
        _err(f"a passphrase is required (--key or ${KEY_ENV})")
        return EXIT_USAGE
    return {"encrypt": run_encrypt, "decrypt": run_decrypt, "analyze": run_analyze}[cfg.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
