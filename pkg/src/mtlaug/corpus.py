"""Reading, filtering and writing whitespace-tokenized parallel corpora.

Corpora are pairs of line-parallel UTF-8 text files, one sentence per
line, tokens separated by whitespace.  Lines are NFC-normalized once on
read so every downstream file the toolkit writes is NFC by construction.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import CorpusError

PARALLEL = "parallel"
BACK_TRANSLATED = "back_translated"
ORIGINS = (PARALLEL, BACK_TRANSLATED)

DEFAULT_MIN_TOKENS = 5
DEFAULT_MAX_TOKENS = 100


@dataclass(frozen=True, slots=True)
class ParallelPair:
    """One sentence pair with a stable id within its corpus."""

    pair_id: int
    src: tuple[str, ...]
    tgt: tuple[str, ...]
    origin: str = PARALLEL

    def __post_init__(self) -> None:
        if self.origin not in ORIGINS:
            raise ValueError(f"unknown origin {self.origin!r}, expected one of {ORIGINS}")
        if not self.src or not self.tgt:
            raise ValueError(f"pair {self.pair_id}: empty side")


def _read_lines(path: str | Path) -> list[str]:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read().splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read corpus file {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise CorpusError(f"corpus file {path} is not valid UTF-8: {exc}") from exc


def read_parallel(src_path: str | Path, tgt_path: str | Path,
                  origin: str = PARALLEL) -> list[ParallelPair]:
    """Read two line-parallel token files into pairs with 0-based ids.

    Raises CorpusError on line-count mismatch or empty lines; empty
    sentences have no place in a training corpus and silently dropping
    them would desynchronize pair ids from alignment files.
    """
    if origin not in ORIGINS:
        raise ValueError(f"unknown origin {origin!r}, expected one of {ORIGINS}")
    src_lines = _read_lines(src_path)
    tgt_lines = _read_lines(tgt_path)
    if len(src_lines) != len(tgt_lines):
        raise CorpusError(
            f"line count mismatch: {src_path} has {len(src_lines)} lines, "
            f"{tgt_path} has {len(tgt_lines)}"
        )
    pairs = []
    for idx, (src_line, tgt_line) in enumerate(zip(src_lines, tgt_lines)):
        src = unicodedata.normalize("NFC", src_line).split()
        tgt = unicodedata.normalize("NFC", tgt_line).split()
        if not src:
            raise CorpusError(f"{src_path}: empty line {idx + 1}")
        if not tgt:
            raise CorpusError(f"{tgt_path}: empty line {idx + 1}")
        pairs.append(ParallelPair(idx, tuple(src), tuple(tgt), origin))
    return pairs


def filter_pairs(pairs: Iterable[ParallelPair],
                 min_tokens: int = DEFAULT_MIN_TOKENS,
                 max_tokens: int = DEFAULT_MAX_TOKENS) -> list[ParallelPair]:
    """Keep pairs whose sides both have min_tokens <= length <= max_tokens."""
    if min_tokens < 1:
        raise ValueError(f"min_tokens must be >= 1, got {min_tokens}")
    if max_tokens < min_tokens:
        raise ValueError(f"max_tokens ({max_tokens}) < min_tokens ({min_tokens})")
    return [
        pair for pair in pairs
        if min_tokens <= len(pair.src) <= max_tokens
        and min_tokens <= len(pair.tgt) <= max_tokens
    ]


def filter_by_length(pairs: Iterable[ParallelPair],
                     max_tokens: int) -> list[ParallelPair]:
    """Length-cap only (used after subword encoding, where no minimum applies)."""
    if max_tokens < 1:
        raise ValueError(f"max_tokens must be >= 1, got {max_tokens}")
    return [
        pair for pair in pairs
        if len(pair.src) <= max_tokens and len(pair.tgt) <= max_tokens
    ]


def write_parallel(pairs: Sequence[ParallelPair],
                   src_path: str | Path, tgt_path: str | Path) -> None:
    """Write pairs back to two line-parallel token files."""
    with open(src_path, "w", encoding="utf-8") as src_handle, \
            open(tgt_path, "w", encoding="utf-8") as tgt_handle:
        for pair in pairs:
            src_handle.write(" ".join(pair.src) + "\n")
            tgt_handle.write(" ".join(pair.tgt) + "\n")
