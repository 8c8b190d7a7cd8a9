"""Assembly of multi-task training streams.

For every epoch the corpus is reshuffled and every pair is emitted as
its original sample followed by one sample per configured
transformation, each weighted 1/(r+1) so a pair's samples always sum to
weight 1.  All randomness is drawn from streams keyed by (seed, epoch,
pair, transform), which makes the stream a pure function of its inputs:
any worker count produces byte-identical output, and different epochs
produce genuinely different random samples.

Streams serialize to JSON lines.  Sample lines carry the task token
prepended to the source; batch boundaries appear as
{"batch_end": true, "token_count": n} lines after greedy packing to a
target-token budget.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping, Sequence

from .alignment import AlignmentSet, BilingualLexicon
from .corpus import BACK_TRANSLATED, PARALLEL, ParallelPair
from .errors import StreamError
from .rng import CORPUS_SCOPE, derive_stream
from .subword import MergeTable, apply_bpe
from .tokens import (
    ALPHA_TRANSFORMS,
    BT,
    MONO,
    ORIGINAL,
    REPLACE,
    REVERSE,
    SOURCE,
    SWAP,
    TRANSFORM_NAMES,
    UNK,
    UNK_TOKEN,
    default_task_tokens,
    reserved_tokens,
)
from .transforms import (
    AugmentedSample,
    original_sample,
    t_mono,
    t_replace,
    t_reverse,
    t_source,
    t_swap,
    t_unk,
)
from .validation import check_alpha, check_positive_int

PHASES = ("augment", "fine_tune")
BT_MODES = ("plain", "augment", "tag", "tag_augment")
DEFAULT_MAX_BATCH_TOKENS = 4000
DEFAULT_ALPHA = Fraction(1, 2)

_SHUFFLE_ID = "shuffle"


def _normalize_transforms(transforms) -> tuple[tuple[str, Fraction | None], ...]:
    normalized: list[tuple[str, Fraction | None]] = []
    for item in transforms:
        if isinstance(item, str):
            name, alpha = item, None
        else:
            name, alpha = item
        if name not in TRANSFORM_NAMES:
            raise ValueError(
                f"unknown transform {name!r}, expected one of {TRANSFORM_NAMES}"
            )
        if name in ALPHA_TRANSFORMS:
            alpha = DEFAULT_ALPHA if alpha is None else check_alpha(alpha)
        elif alpha is not None:
            raise ValueError(f"transform {name!r} takes no alpha")
        normalized.append((name, alpha))
    names = [name for name, _ in normalized]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate transforms in {names}")
    return tuple(normalized)


@dataclass(frozen=True)
class StreamConfig:
    """Everything that determines a stream besides the corpus itself."""

    transforms: tuple[tuple[str, Fraction | None], ...] = ()
    seed: int = 0
    max_batch_tokens: int = DEFAULT_MAX_BATCH_TOKENS
    bt_mode: str = "plain"
    phase: str = "augment"
    task_tokens: Mapping[str, str] = field(default_factory=default_task_tokens)

    def __post_init__(self) -> None:
        object.__setattr__(self, "transforms", _normalize_transforms(self.transforms))
        check_positive_int(self.max_batch_tokens, "max_batch_tokens")
        if self.phase not in PHASES:
            raise ValueError(f"phase must be one of {PHASES}, got {self.phase!r}")
        if self.bt_mode not in BT_MODES:
            raise ValueError(
                f"bt_mode must be one of {BT_MODES}, got {self.bt_mode!r}"
            )

    @property
    def sample_weight(self) -> Fraction:
        """Weight of each sample in an augmented pair group: 1/(r+1)."""
        return Fraction(1, len(self.transforms) + 1)

    def task_token(self, task: str) -> str:
        token = self.task_tokens.get(task)
        if token is None:
            raise ValueError(f"no task token configured for task {task!r}")
        return token


@dataclass(frozen=True, slots=True)
class StreamEntry:
    """A corpus pair plus its stream behavior flags."""

    pair: ParallelPair
    augment: bool = True
    tag: str | None = None


@dataclass(frozen=True)
class StreamResources:
    """Side inputs some transformations and the serializer need."""

    alignments: Mapping[int, AlignmentSet] | None = None  # s->t, for mono
    one_to_one: Mapping[int, AlignmentSet] | None = None  # intersected, for replace
    lexicon: BilingualLexicon | None = None
    merges: MergeTable | None = None


def as_entries(pairs: Iterable[ParallelPair | StreamEntry]) -> list[StreamEntry]:
    return [
        item if isinstance(item, StreamEntry) else StreamEntry(item)
        for item in pairs
    ]


def combine_bt(parallel: Sequence[ParallelPair], bt: Sequence[ParallelPair],
               bt_mode: str) -> list[StreamEntry]:
    """Merge a parallel corpus with back-translated pairs.

    Back-translated pairs are re-numbered after the parallel ids.  The
    mode decides whether bt pairs are augmented and whether their task
    names carry a "bt" tag:

    plain        bt originals only, untagged
    augment      bt pairs augmented like parallel data, untagged
    tag          bt originals only, task "bt"
    tag_augment  bt pairs augmented, tasks "bt"/"bt+<transform>"
    """
    if bt_mode not in BT_MODES:
        raise ValueError(f"bt_mode must be one of {BT_MODES}, got {bt_mode!r}")
    entries = [StreamEntry(pair) for pair in parallel]
    offset = max((pair.pair_id for pair in parallel), default=-1) + 1
    augment = bt_mode in ("augment", "tag_augment")
    tag = BT if bt_mode in ("tag", "tag_augment") else None
    for pair in bt:
        renumbered = replace(
            pair, pair_id=offset + pair.pair_id, origin=BACK_TRANSLATED
        )
        entries.append(StreamEntry(renumbered, augment=augment, tag=tag))
    return entries


def epoch_order(n_entries: int, config: StreamConfig, epoch: int) -> list[int]:
    """The shuffled entry order for one epoch."""
    order = list(range(n_entries))
    derive_stream(config.seed, epoch, CORPUS_SCOPE, _SHUFFLE_ID).shuffle(order)
    return order


def _check_resources(config: StreamConfig, resources: StreamResources | None) -> None:
    names = {name for name, _ in config.transforms}
    if config.phase == "fine_tune":
        return
    if MONO in names and (resources is None or resources.alignments is None):
        raise ValueError("mono transform requires source-to-target alignments")
    if REPLACE in names:
        if resources is None or resources.one_to_one is None:
            raise ValueError("replace transform requires one-to-one alignments")
        if resources.lexicon is None or len(resources.lexicon) == 0:
            raise ValueError("replace transform requires a non-empty lexicon")


def pair_samples(entry: StreamEntry, config: StreamConfig, epoch: int,
                 resources: StreamResources | None = None) -> list[AugmentedSample]:
    """All samples one entry contributes to one epoch, original first."""
    pair = entry.pair
    if config.phase == "fine_tune" or not entry.augment:
        task = entry.tag if entry.tag else ORIGINAL
        return [original_sample(pair, epoch=epoch, task=task)]
    weight = config.sample_weight
    base_task = entry.tag if entry.tag else ORIGINAL
    samples = [original_sample(pair, weight=weight, epoch=epoch, task=base_task)]
    for name, alpha in config.transforms:
        task = f"{entry.tag}+{name}" if entry.tag else name
        common = {"weight": weight, "epoch": epoch, "task": task}
        if name == SWAP:
            rng = derive_stream(config.seed, epoch, pair.pair_id, name)
            samples.append(t_swap(pair, alpha, rng, **common))
        elif name == UNK:
            rng = derive_stream(config.seed, epoch, pair.pair_id, name)
            samples.append(t_unk(pair, alpha, rng, **common))
        elif name == SOURCE:
            samples.append(t_source(pair, **common))
        elif name == REVERSE:
            samples.append(t_reverse(pair, **common))
        elif name == MONO:
            alignment = resources.alignments.get(pair.pair_id)
            if alignment is None:
                raise StreamError(
                    f"pair {pair.pair_id}: no source-to-target alignment "
                    f"for the mono transform"
                )
            samples.append(t_mono(pair, alignment, **common))
        else:  # REPLACE
            one_to_one = resources.one_to_one.get(pair.pair_id)
            if one_to_one is None:
                raise StreamError(
                    f"pair {pair.pair_id}: no one-to-one alignment "
                    f"for the replace transform"
                )
            rng = derive_stream(config.seed, epoch, pair.pair_id, name)
            samples.append(
                t_replace(pair, one_to_one, resources.lexicon, alpha, rng, **common)
            )
    return samples


def epoch_stream(pairs: Iterable[ParallelPair | StreamEntry],
                 config: StreamConfig, epoch: int,
                 resources: StreamResources | None = None,
                 ) -> Iterator[AugmentedSample]:
    """Generate one epoch's samples in shuffled pair order."""
    if epoch < 0:
        raise ValueError(f"epoch must be non-negative, got {epoch}")
    entries = as_entries(pairs)
    _check_resources(config, resources)
    for index in epoch_order(len(entries), config, epoch):
        yield from pair_samples(entries[index], config, epoch, resources)


@dataclass(frozen=True, slots=True)
class Batch:
    """Greedily packed samples; oversize marks a single too-long sample."""

    samples: tuple[AugmentedSample, ...]
    token_count: int
    oversize: bool = False


def make_batches(samples: Iterable[AugmentedSample],
                 max_batch_tokens: int = DEFAULT_MAX_BATCH_TOKENS,
                 ) -> Iterator[Batch]:
    """Pack samples in stream order up to a label-token budget per batch.

    A sample longer than the budget becomes its own batch, flagged
    oversize, rather than being dropped or split.
    """
    check_positive_int(max_batch_tokens, "max_batch_tokens")
    current: list[AugmentedSample] = []
    count = 0
    for sample in samples:
        tokens = len(sample.tgt_lbl)
        if tokens > max_batch_tokens:
            if current:
                yield Batch(tuple(current), count)
                current, count = [], 0
            yield Batch((sample,), tokens, oversize=True)
            continue
        if count + tokens > max_batch_tokens:
            yield Batch(tuple(current), count)
            current, count = [], 0
        current.append(sample)
        count += tokens
    if current:
        yield Batch(tuple(current), count)


def encode_sample(sample: AugmentedSample, merges: MergeTable | None,
                  reserved: frozenset[str]) -> AugmentedSample:
    """Subword-encode a sample, preserving context/label length equality.

    Masked context positions expand to one placeholder per subword of
    the corresponding label word.
    """
    if merges is None:
        return sample
    src = apply_bpe(sample.src, merges, reserved=reserved)
    if sample.tgt_ctx == sample.tgt_lbl:
        tgt = apply_bpe(sample.tgt_lbl, merges, reserved=reserved)
        return replace(sample, src=src, tgt_ctx=tgt, tgt_lbl=tgt)
    ctx_out: list[str] = []
    lbl_out: list[str] = []
    for ctx_word, lbl_word in zip(sample.tgt_ctx, sample.tgt_lbl):
        pieces = apply_bpe((lbl_word,), merges, reserved=reserved)
        lbl_out.extend(pieces)
        if ctx_word == lbl_word:
            ctx_out.extend(pieces)
        elif ctx_word == UNK_TOKEN:
            ctx_out.extend([UNK_TOKEN] * len(pieces))
        else:
            raise ValueError(
                f"pair {sample.pair_id}: context/label mismatch other than "
                f"{UNK_TOKEN!r} cannot be subword-encoded"
            )
    return replace(sample, src=src, tgt_ctx=tuple(ctx_out), tgt_lbl=tuple(lbl_out))


def sample_to_json(sample: AugmentedSample, config: StreamConfig) -> str:
    """One sample line; the task token is prepended to the source here."""
    doc = {
        "epoch": sample.epoch,
        "pair_id": sample.pair_id,
        "task": sample.task,
        "origin": "bt" if sample.origin == BACK_TRANSLATED else PARALLEL,
        "weight": float(sample.weight),
        "src": [config.task_token(sample.task), *sample.src],
        "tgt_ctx": list(sample.tgt_ctx),
        "tgt_lbl": list(sample.tgt_lbl),
    }
    return json.dumps(doc, ensure_ascii=False, separators=(",", ":"))


def batch_end_json(token_count: int) -> str:
    return json.dumps(
        {"batch_end": True, "token_count": token_count}, separators=(",", ":")
    )


def _entry_lines(entry: StreamEntry, config: StreamConfig, epoch: int,
                 resources: StreamResources | None,
                 reserved: frozenset[str]) -> list[tuple[str, int]]:
    merges = resources.merges if resources else None
    lines = []
    for sample in pair_samples(entry, config, epoch, resources):
        encoded = encode_sample(sample, merges, reserved)
        lines.append((sample_to_json(encoded, config), len(encoded.tgt_lbl)))
    return lines


_WORKER: dict = {}


def _init_worker(entries, config, resources, reserved) -> None:
    _WORKER.update(
        entries=entries, config=config, resources=resources, reserved=reserved
    )


def _lines_for_chunk(task: tuple[int, list[int]]) -> list[tuple[str, int]]:
    epoch, indices = task
    out: list[tuple[str, int]] = []
    for index in indices:
        out.extend(
            _entry_lines(
                _WORKER["entries"][index], _WORKER["config"], epoch,
                _WORKER["resources"], _WORKER["reserved"],
            )
        )
    return out


def write_stream(out: IO[str] | str | Path,
                 pairs: Iterable[ParallelPair | StreamEntry],
                 config: StreamConfig,
                 epochs: int | Iterable[int],
                 resources: StreamResources | None = None,
                 workers: int = 1) -> dict:
    """Write a serialized stream for the given epochs; returns counts.

    The output is a pure function of (pairs, config, epochs, resources):
    worker count only changes how the work is divided.  Batches never
    span epochs.
    """
    if isinstance(out, (str, Path)):
        with open(out, "w", encoding="utf-8") as handle:
            return write_stream(handle, pairs, config, epochs, resources, workers)
    check_positive_int(workers, "workers")
    epoch_list = list(range(epochs)) if isinstance(epochs, int) else list(epochs)
    entries = as_entries(pairs)
    _check_resources(config, resources)
    reserved = reserved_tokens(dict(config.task_tokens))

    totals = {"samples": 0, "batches": 0, "tokens": 0, "epochs": len(epoch_list)}

    def run_epoch(line_groups: Iterable[list[tuple[str, int]]]) -> None:
        current = 0
        pending = False
        for group in line_groups:
            for line, tokens in group:
                if tokens > config.max_batch_tokens:
                    if pending:
                        out.write(batch_end_json(current) + "\n")
                        totals["batches"] += 1
                        current, pending = 0, False
                    out.write(line + "\n")
                    out.write(batch_end_json(tokens) + "\n")
                    totals["samples"] += 1
                    totals["tokens"] += tokens
                    totals["batches"] += 1
                    continue
                if current + tokens > config.max_batch_tokens:
                    out.write(batch_end_json(current) + "\n")
                    totals["batches"] += 1
                    current, pending = 0, False
                out.write(line + "\n")
                totals["samples"] += 1
                totals["tokens"] += tokens
                current += tokens
                pending = True
        if pending:
            out.write(batch_end_json(current) + "\n")
            totals["batches"] += 1

    if workers == 1:
        for epoch in epoch_list:
            order = epoch_order(len(entries), config, epoch)
            run_epoch(
                _entry_lines(entries[index], config, epoch, resources, reserved)
                for index in order
            )
        return totals

    chunk_size = 256
    with ProcessPoolExecutor(
        max_workers=workers,
        initializer=_init_worker,
        initargs=(entries, config, resources, reserved),
    ) as pool:
        for epoch in epoch_list:
            order = epoch_order(len(entries), config, epoch)
            tasks = [
                (epoch, order[start:start + chunk_size])
                for start in range(0, len(order), chunk_size)
            ]
            run_epoch(pool.map(_lines_for_chunk, tasks))
    return totals
