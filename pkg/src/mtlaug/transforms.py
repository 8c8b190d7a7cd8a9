"""Target-side transformations that synthesize non-fluent training samples.

Each transformation takes a sentence pair and produces an augmented
sample: a (possibly modified) source, a decoder-context target and a
label target.  Context and labels are identical for every transformation
except unk, which masks context tokens while the labels keep the
original words, so the model must predict through unreliable context.

The degradation ratio alpha controls how many positions each ratio-based
transformation touches; counts are floor expressions evaluated in exact
decimal arithmetic (see validation.check_alpha).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .alignment import AlignmentSet, BilingualLexicon, target_to_source
from .corpus import ParallelPair
from .rng import RandomStream
from .tokens import MONO, ORIGINAL, REPLACE, REVERSE, SOURCE, SWAP, UNK, UNK_TOKEN
from .validation import check_alpha

ONE = Fraction(1)


def _ctx_mismatch_allowed(task: str) -> bool:
    # "unk" or a tagged variant like "bt+unk"
    return task.rsplit("+", 1)[-1] == UNK


@dataclass(frozen=True, slots=True)
class AugmentedSample:
    """One training sample of a multi-task stream."""

    task: str
    src: tuple[str, ...]
    tgt_ctx: tuple[str, ...]
    tgt_lbl: tuple[str, ...]
    weight: Fraction
    pair_id: int
    epoch: int
    origin: str

    def __post_init__(self) -> None:
        if len(self.tgt_ctx) != len(self.tgt_lbl):
            raise ValueError(
                f"pair {self.pair_id}: context and label lengths differ "
                f"({len(self.tgt_ctx)} vs {len(self.tgt_lbl)})"
            )
        if not 0 < self.weight <= 1:
            raise ValueError(f"weight must be in (0, 1], got {self.weight}")
        if self.tgt_ctx != self.tgt_lbl and not _ctx_mismatch_allowed(self.task):
            raise ValueError(
                f"task {self.task!r} must have identical context and labels"
            )


def original_sample(pair: ParallelPair, *, weight: Fraction = ONE,
                    epoch: int = 0, task: str = ORIGINAL) -> AugmentedSample:
    """The untransformed pair as a sample."""
    return AugmentedSample(task, pair.src, pair.tgt, pair.tgt,
                           weight, pair.pair_id, epoch, pair.origin)


def _count(alpha, m: int, halved: bool = False) -> int:
    frac = check_alpha(alpha) * m
    if halved:
        frac = frac / 2
    return math.floor(frac)


def t_swap(pair: ParallelPair, alpha, rng: RandomStream, *,
           weight: Fraction = ONE, epoch: int = 0,
           task: str = SWAP) -> AugmentedSample:
    """Chain-swap floor(alpha*m/2) pairs of target positions.

    2*floor(alpha*m/2) distinct positions are drawn in one pass and the
    transpositions (d0,d1), (d1,d2), ... are applied in sequence, which
    displaces every drawn position (each receives the token of the next
    drawn position, the last receives the first).  A single drawn pair
    reduces to a plain swap.
    """
    m = len(pair.tgt)
    pairs_to_swap = _count(alpha, m, halved=True)
    out = list(pair.tgt)
    if pairs_to_swap:
        drawn = rng.sample(m, 2 * pairs_to_swap)
        for left, right in zip(drawn, drawn[1:]):
            out[left], out[right] = out[right], out[left]
    tgt = tuple(out)
    return AugmentedSample(task, pair.src, tgt, tgt,
                           weight, pair.pair_id, epoch, pair.origin)


def t_unk(pair: ParallelPair, alpha, rng: RandomStream, *,
          weight: Fraction = ONE, epoch: int = 0,
          task: str = UNK) -> AugmentedSample:
    """Mask floor(alpha*m) context positions with the UNK placeholder.

    Only the decoder context is masked; the labels keep the original
    tokens, so the masked positions are still predicted.
    """
    m = len(pair.tgt)
    n = _count(alpha, m)
    ctx = list(pair.tgt)
    if n:
        for position in rng.sample(m, n):
            ctx[position] = UNK_TOKEN
    return AugmentedSample(task, pair.src, tuple(ctx), pair.tgt,
                           weight, pair.pair_id, epoch, pair.origin)


def t_source(pair: ParallelPair, *, weight: Fraction = ONE, epoch: int = 0,
             task: str = SOURCE) -> AugmentedSample:
    """Replace the target with a copy of the source."""
    return AugmentedSample(task, pair.src, pair.src, pair.src,
                           weight, pair.pair_id, epoch, pair.origin)


def t_reverse(pair: ParallelPair, *, weight: Fraction = ONE, epoch: int = 0,
              task: str = REVERSE) -> AugmentedSample:
    """Reverse the target token order."""
    tgt = tuple(reversed(pair.tgt))
    return AugmentedSample(task, pair.src, tgt, tgt,
                           weight, pair.pair_id, epoch, pair.origin)


def t_mono(pair: ParallelPair, alignment: AlignmentSet, *,
           weight: Fraction = ONE, epoch: int = 0,
           task: str = MONO) -> AugmentedSample:
    """Reorder the target so its alignment to the source is monotone.

    Each target position gets its aligned source index as sort key;
    unaligned positions inherit the key of the nearest preceding aligned
    position (or -1 before the first one).  The sort is stable, so
    positions with equal keys keep their original order.
    """
    if (alignment.src_len, alignment.tgt_len) != (len(pair.src), len(pair.tgt)):
        raise ValueError(
            f"pair {pair.pair_id}: alignment lengths "
            f"{alignment.src_len}/{alignment.tgt_len} do not match the pair"
        )
    to_source = target_to_source(alignment)
    keys: list[int] = []
    last = -1
    for position in range(len(pair.tgt)):
        source = to_source.get(position)
        if source is not None:
            last = source
        keys.append(last)
    order = sorted(range(len(pair.tgt)), key=keys.__getitem__)
    tgt = tuple(pair.tgt[position] for position in order)
    return AugmentedSample(task, pair.src, tgt, tgt,
                           weight, pair.pair_id, epoch, pair.origin)


def t_replace(pair: ParallelPair, one_to_one: AlignmentSet,
              lexicon: BilingualLexicon, alpha, rng: RandomStream, *,
              weight: Fraction = ONE, epoch: int = 0,
              task: str = REPLACE) -> AugmentedSample:
    """Replace min(floor(alpha*m), links) aligned word pairs on both sides.

    Links are enumerated in sorted (s, t) order; the sampled links are
    processed in draw order and each receives an independent uniform
    draw from the lexicon entry list (with replacement across links).
    """
    if (one_to_one.src_len, one_to_one.tgt_len) != (len(pair.src), len(pair.tgt)):
        raise ValueError(
            f"pair {pair.pair_id}: alignment lengths "
            f"{one_to_one.src_len}/{one_to_one.tgt_len} do not match the pair"
        )
    links = sorted(one_to_one.links)
    for side, index_of in (("source", 0), ("target", 1)):
        seen: set[int] = set()
        for link in links:
            if link[index_of] in seen:
                raise ValueError(
                    f"pair {pair.pair_id}: alignment is not one-to-one "
                    f"({side} index {link[index_of]} linked twice)"
                )
            seen.add(link[index_of])
    n = min(_count(alpha, len(pair.tgt)), len(links))
    src = list(pair.src)
    tgt = list(pair.tgt)
    if n:
        if len(lexicon) == 0:
            raise ValueError("replace needs a non-empty lexicon")
        for link_index in rng.sample(len(links), n):
            s, t = links[link_index]
            source_word, target_word, _ = lexicon.entry_list[
                rng.randrange(len(lexicon))
            ]
            src[s] = source_word
            tgt[t] = target_word
    tgt_out = tuple(tgt)
    return AugmentedSample(task, tuple(src), tgt_out, tgt_out,
                           weight, pair.pair_id, epoch, pair.origin)
