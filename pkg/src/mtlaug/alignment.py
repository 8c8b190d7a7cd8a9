"""Word alignments in pharaoh format and bilingual lexicon extraction.

Pharaoh lines are space-separated "s-t" index pairs.  Directional
alignments from both translation directions are intersected and pruned
to one-to-one links; a bilingual lexicon keeps, per source word, the
target word it was most frequently linked to.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import ParallelPair
from .errors import AlignmentError


@dataclass(frozen=True, slots=True)
class AlignmentSet:
    """Links for one sentence pair, as (source index, target index)."""

    links: frozenset[tuple[int, int]]
    src_len: int
    tgt_len: int

    def __post_init__(self) -> None:
        if self.src_len < 1 or self.tgt_len < 1:
            raise ValueError("side lengths must be positive")
        for s, t in self.links:
            if not (0 <= s < self.src_len and 0 <= t < self.tgt_len):
                raise AlignmentError(
                    f"link {s}-{t} out of bounds for lengths "
                    f"{self.src_len}/{self.tgt_len}"
                )

    def swapped(self) -> AlignmentSet:
        """Flip link orientation (and side lengths) to the other direction."""
        return AlignmentSet(
            frozenset((t, s) for s, t in self.links), self.tgt_len, self.src_len
        )


def parse_pharaoh(line: str, src_len: int, tgt_len: int) -> AlignmentSet:
    """Parse one pharaoh line; an empty line means no links."""
    links = set()
    for field in line.split():
        left, sep, right = field.partition("-")
        if not sep or not left.isdigit() or not right.isdigit():
            raise AlignmentError(f"malformed alignment field {field!r}")
        links.add((int(left), int(right)))
    return AlignmentSet(frozenset(links), src_len, tgt_len)


def read_pharaoh_file(path: str | Path,
                      pairs: Sequence[ParallelPair], *,
                      swapped: bool = False) -> dict[int, AlignmentSet]:
    """Read a pharaoh file line-parallel with the corpus the pairs came from.

    Alignment files are produced on the unfiltered corpus, so lines are
    matched to pairs by pair_id (the 0-based corpus line).  With swapped
    the file's links are "t-s" (the reverse-direction aligner output) and
    are flipped into (s, t) orientation.
    """
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise AlignmentError(f"cannot read alignment file {path}: {exc}") from exc
    by_id: dict[int, AlignmentSet] = {}
    for pair in pairs:
        if pair.pair_id >= len(lines):
            raise AlignmentError(
                f"{path}: no line for pair {pair.pair_id} "
                f"(file has {len(lines)} lines)"
            )
        src_len, tgt_len = len(pair.src), len(pair.tgt)
        try:
            if swapped:
                parsed = parse_pharaoh(lines[pair.pair_id], tgt_len, src_len).swapped()
            else:
                parsed = parse_pharaoh(lines[pair.pair_id], src_len, tgt_len)
        except AlignmentError as exc:
            raise AlignmentError(f"{path}: line {pair.pair_id + 1}: {exc}") from exc
        by_id[pair.pair_id] = parsed
    return by_id


def intersect(a_st: AlignmentSet, a_ts: AlignmentSet) -> AlignmentSet:
    """Intersect two same-orientation link sets and prune to one-to-one.

    Both arguments must be in (s, t) orientation (flip the reverse
    direction with swapped() first).  After intersecting, any link whose
    source or target index still participates in more than one link is
    dropped, so the result is strictly one-to-one.
    """
    if (a_st.src_len, a_st.tgt_len) != (a_ts.src_len, a_ts.tgt_len):
        raise AlignmentError(
            f"cannot intersect alignments with lengths "
            f"{a_st.src_len}/{a_st.tgt_len} and {a_ts.src_len}/{a_ts.tgt_len}"
        )
    common = a_st.links & a_ts.links
    src_degree = Counter(s for s, _ in common)
    tgt_degree = Counter(t for _, t in common)
    kept = frozenset(
        (s, t) for s, t in common if src_degree[s] == 1 and tgt_degree[t] == 1
    )
    return AlignmentSet(kept, a_st.src_len, a_st.tgt_len)


def target_to_source(alignment: AlignmentSet) -> dict[int, int]:
    """Map each aligned target index to its source index.

    Requires every target index to be linked at most once; many-to-one
    target links are ambiguous for monotone reordering.
    """
    mapping: dict[int, int] = {}
    for s, t in sorted(alignment.links):
        if t in mapping:
            raise AlignmentError(f"target index {t} is linked more than once")
        mapping[t] = s
    return mapping


@dataclass(frozen=True)
class BilingualLexicon:
    """Best aligned target word per source word, with its link count."""

    entry_list: tuple[tuple[str, str, int], ...]  # (source, target, count), sorted

    def __post_init__(self) -> None:
        sources = [entry[0] for entry in self.entry_list]
        if sources != sorted(sources):
            raise ValueError("entry_list must be sorted by source word")
        if len(set(sources)) != len(sources):
            raise ValueError("entry_list has duplicate source words")
        for source, target, count in self.entry_list:
            if not source or not target or count < 1:
                raise ValueError(f"malformed entry {(source, target, count)!r}")

    def __len__(self) -> int:
        return len(self.entry_list)

    def lookup(self, source: str) -> tuple[str, int] | None:
        lo, hi = 0, len(self.entry_list)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.entry_list[mid][0] < source:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.entry_list) and self.entry_list[lo][0] == source:
            return self.entry_list[lo][1], self.entry_list[lo][2]
        return None


def build_lexicon(pairs: Iterable[ParallelPair],
                  alignments: Mapping[int, AlignmentSet]) -> BilingualLexicon:
    """Count aligned word pairs and keep the argmax target per source word.

    Ties on count resolve to the lexicographically smallest target word.
    Every pair must have an alignment entry; extra alignment entries for
    pair ids not in pairs are ignored.
    """
    counts: Counter[tuple[str, str]] = Counter()
    for pair in pairs:
        alignment = alignments.get(pair.pair_id)
        if alignment is None:
            raise AlignmentError(f"no alignment for pair {pair.pair_id}")
        if (alignment.src_len, alignment.tgt_len) != (len(pair.src), len(pair.tgt)):
            raise AlignmentError(
                f"pair {pair.pair_id}: alignment lengths "
                f"{alignment.src_len}/{alignment.tgt_len} do not match the pair "
                f"({len(pair.src)}/{len(pair.tgt)})"
            )
        for s, t in alignment.links:
            counts[(pair.src[s], pair.tgt[t])] += 1
    best: dict[str, tuple[str, int]] = {}
    for (source, target), count in sorted(counts.items()):
        current = best.get(source)
        if current is None or count > current[1]:
            best[source] = (target, count)
    entries = tuple(
        (source, target, count)
        for source, (target, count) in sorted(best.items())
    )
    return BilingualLexicon(entries)


def save_lexicon(lexicon: BilingualLexicon, path: str | Path) -> None:
    """Write tab-separated "source\\ttarget\\tcount" lines, sorted by source."""
    with open(path, "w", encoding="utf-8") as handle:
        for source, target, count in lexicon.entry_list:
            handle.write(f"{source}\t{target}\t{count}\n")


def load_lexicon(path: str | Path) -> BilingualLexicon:
    entries: list[tuple[str, str, int]] = []
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.rstrip("\n")
                parts = line.split("\t")
                if len(parts) != 3 or not parts[0] or not parts[1]:
                    raise AlignmentError(
                        f"{path}: line {lineno}: expected "
                        f"'source<TAB>target<TAB>count', got {line!r}"
                    )
                if not parts[2].isdigit() or int(parts[2]) < 1:
                    raise AlignmentError(
                        f"{path}: line {lineno}: bad count {parts[2]!r}"
                    )
                entries.append((parts[0], parts[1], int(parts[2])))
    except OSError as exc:
        raise AlignmentError(f"cannot read lexicon {path}: {exc}") from exc
    try:
        return BilingualLexicon(tuple(entries))
    except ValueError as exc:
        raise AlignmentError(f"{path}: {exc}") from exc
