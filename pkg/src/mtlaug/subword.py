"""Byte-pair subword segmentation learned jointly over corpus text.

Words are split into symbol sequences whose last symbol carries an
end-of-word marker; learning repeatedly merges the most frequent
adjacent symbol pair.  Applied to text, merges reproduce the learned
segmentation and non-final subwords are rendered with a continuation
suffix ("@@" by default) so segmentation is reversible.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

from .errors import SubwordError
from .tokens import DEFAULT_RESERVED

WORD_END = "</w>"
DEFAULT_SEPARATOR = "@@"


@dataclass(frozen=True)
class MergeTable:
    """An ordered list of merges; earlier merges have priority when applied."""

    merges: tuple[tuple[str, str], ...]
    separator: str = DEFAULT_SEPARATOR

    def __post_init__(self) -> None:
        if not self.separator or self.separator.split() != [self.separator]:
            raise SubwordError("separator must be non-empty without whitespace")
        seen = set()
        for merge in self.merges:
            if len(merge) != 2:
                raise SubwordError(f"malformed merge {merge!r}")
            for symbol in merge:
                if not symbol or symbol.split() != [symbol]:
                    raise SubwordError(f"malformed symbol in merge {merge!r}")
                if self.separator in symbol:
                    raise SubwordError(
                        f"merge {merge!r} contains the separator {self.separator!r}"
                    )
            if merge in seen:
                raise SubwordError(f"duplicate merge {merge!r}")
            seen.add(merge)

    def __len__(self) -> int:
        return len(self.merges)

    @cached_property
    def ranks(self) -> dict[tuple[str, str], int]:
        return {pair: rank for rank, pair in enumerate(self.merges)}

    @cached_property
    def _word_cache(self) -> dict[str, tuple[str, ...]]:
        # per-table memo of word -> rendered subwords; safe because the
        # table is immutable
        return {}


def _word_symbols(word: str) -> list[str]:
    return list(word[:-1]) + [word[-1] + WORD_END]


def learn_bpe(corpus: Iterable[Sequence[str] | str], num_merges: int, *,
              reserved: frozenset[str] = DEFAULT_RESERVED,
              separator: str = DEFAULT_SEPARATOR) -> MergeTable:
    """Learn up to num_merges merges from an iterable of lines or token lists.

    Learning stops early when no pair occurs at least twice.  Ties on
    count resolve to the lexicographically smallest pair, so the result
    is a pure function of the corpus: learning k merges yields a prefix
    of learning k+1.  Reserved tokens are excluded from learning; tokens
    containing the separator are rejected because the rendered output
    would be ambiguous.
    """
    if num_merges < 0:
        raise ValueError(f"num_merges must be non-negative, got {num_merges}")
    word_freq: Counter[str] = Counter()
    for item in corpus:
        tokens = item.split() if isinstance(item, str) else item
        for tok in tokens:
            if tok in reserved:
                continue
            if separator in tok:
                raise SubwordError(
                    f"token {tok!r} contains the separator {separator!r}"
                )
            word_freq[tok] += 1
    if not word_freq:
        raise SubwordError("cannot learn merges from an empty corpus")

    words: list[list[str]] = []
    freqs: list[int] = []
    for word, freq in word_freq.items():
        words.append(_word_symbols(word))
        freqs.append(freq)

    stats: Counter[tuple[str, str]] = Counter()
    where: defaultdict[tuple[str, str], set[int]] = defaultdict(set)
    for idx, symbols in enumerate(words):
        freq = freqs[idx]
        for pair in zip(symbols, symbols[1:]):
            stats[pair] += freq
            where[pair].add(idx)

    merges: list[tuple[str, str]] = []
    for _ in range(num_merges):
        best_pair = None
        best_count = 0
        for pair, count in stats.items():
            if count > best_count or (count == best_count and pair < best_pair):
                best_pair, best_count = pair, count
        if best_pair is None or best_count < 2:
            break
        merges.append(best_pair)
        new_symbol = best_pair[0] + best_pair[1]
        for idx in sorted(where[best_pair]):
            symbols = words[idx]
            freq = freqs[idx]
            for pair in zip(symbols, symbols[1:]):
                stats[pair] -= freq
                if stats[pair] <= 0:
                    del stats[pair]
                bucket = where.get(pair)
                if bucket is not None:
                    bucket.discard(idx)
            rebuilt: list[str] = []
            pos = 0
            while pos < len(symbols):
                if (pos + 1 < len(symbols)
                        and symbols[pos] == best_pair[0]
                        and symbols[pos + 1] == best_pair[1]):
                    rebuilt.append(new_symbol)
                    pos += 2
                else:
                    rebuilt.append(symbols[pos])
                    pos += 1
            words[idx] = rebuilt
            for pair in zip(rebuilt, rebuilt[1:]):
                stats[pair] += freq
                where[pair].add(idx)
        where.pop(best_pair, None)
    return MergeTable(tuple(merges), separator)


def _encode_word(word: str, table: MergeTable) -> tuple[str, ...]:
    symbols = _word_symbols(word)
    ranks = table.ranks
    while len(symbols) > 1:
        best_rank = None
        for pair in zip(symbols, symbols[1:]):
            rank = ranks.get(pair)
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
        if best_rank is None:
            break
        left, right = table.merges[best_rank]
        rebuilt: list[str] = []
        pos = 0
        while pos < len(symbols):
            if (pos + 1 < len(symbols)
                    and symbols[pos] == left and symbols[pos + 1] == right):
                rebuilt.append(left + right)
                pos += 2
            else:
                rebuilt.append(symbols[pos])
                pos += 1
        symbols = rebuilt
    sep = table.separator
    rendered = [symbol + sep for symbol in symbols[:-1]]
    last = symbols[-1]
    if not last.endswith(WORD_END):  # merges only concatenate, marker stays last
        raise SubwordError(f"internal: lost end-of-word marker in {word!r}")
    rendered.append(last[: -len(WORD_END)])
    return tuple(rendered)


def apply_bpe(tokens: Sequence[str], table: MergeTable, *,
              reserved: frozenset[str] = DEFAULT_RESERVED) -> tuple[str, ...]:
    """Segment each token with the merge table; reserved tokens stay atomic.

    Merges apply by priority: the lowest-rank applicable merge is applied
    to all its occurrences, left to right, until none applies.
    """
    out: list[str] = []
    cache = table._word_cache
    for tok in tokens:
        if tok in reserved:
            out.append(tok)
            continue
        pieces = cache.get(tok)
        if pieces is None:
            pieces = _encode_word(tok, table)
            cache[tok] = pieces
        out.extend(pieces)
    return tuple(out)


def undo_bpe(tokens: Sequence[str], separator: str = DEFAULT_SEPARATOR) -> tuple[str, ...]:
    """Join continuation-suffixed subwords back into words."""
    if not separator or separator.split() != [separator]:
        raise ValueError("separator must be non-empty without whitespace")
    out: list[str] = []
    buf: list[str] = []
    for tok in tokens:
        if tok.endswith(separator):
            buf.append(tok[: -len(separator)])
        else:
            buf.append(tok)
            out.append("".join(buf))
            buf.clear()
    if buf:
        raise SubwordError("sequence ends with a continuation token")
    return tuple(out)


def save_merges(table: MergeTable, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for left, right in table.merges:
            handle.write(f"{left} {right}\n")


def load_merges(path: str | Path,
                separator: str = DEFAULT_SEPARATOR) -> MergeTable:
    merges: list[tuple[str, str]] = []
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.rstrip("\n")
                parts = line.split(" ")
                if len(parts) != 2 or not parts[0] or not parts[1]:
                    raise SubwordError(
                        f"{path}: line {lineno}: expected 'LEFT RIGHT', got {line!r}"
                    )
                merges.append((parts[0], parts[1]))
    except OSError as exc:
        raise SubwordError(f"cannot read merge table {path}: {exc}") from exc
    return MergeTable(tuple(merges), separator)
