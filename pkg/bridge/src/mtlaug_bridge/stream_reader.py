"""Reader for the augmentation stream's JSON-lines wire format.

Two line shapes are accepted: sample objects carrying the keys epoch,
pair_id, task, origin, weight, src, tgt_ctx and tgt_lbl, and batch
markers {"batch_end": true, "token_count": n} closing the samples since
the previous marker.  Any deviation raises BridgeError naming the line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .errors import BridgeError

SAMPLE_KEYS = frozenset(
    ("epoch", "pair_id", "task", "origin", "weight", "src", "tgt_ctx", "tgt_lbl")
)


@dataclass(frozen=True, slots=True)
class TrainingExample:
    """One weighted sample; src already starts with its task token."""

    epoch: int
    pair_id: int
    task: str
    origin: str
    weight: float
    src: tuple[str, ...]
    tgt_ctx: tuple[str, ...]
    tgt_lbl: tuple[str, ...]


def _token_list(doc: dict, key: str, where: str) -> tuple[str, ...]:
    value = doc[key]
    if (not isinstance(value, list) or not value
            or not all(isinstance(tok, str) and tok for tok in value)):
        raise BridgeError(f"{where}: {key} must be a non-empty list of tokens")
    return tuple(value)


def _parse_sample(doc: dict, where: str) -> TrainingExample:
    missing = SAMPLE_KEYS.difference(doc)
    if missing:
        raise BridgeError(f"{where}: missing key {sorted(missing)[0]!r}")
    epoch, pair_id = doc["epoch"], doc["pair_id"]
    if not isinstance(epoch, int) or isinstance(epoch, bool) or epoch < 0:
        raise BridgeError(f"{where}: bad epoch {epoch!r}")
    if not isinstance(pair_id, int) or isinstance(pair_id, bool) or pair_id < 0:
        raise BridgeError(f"{where}: bad pair_id {pair_id!r}")
    for key in ("task", "origin"):
        if not isinstance(doc[key], str) or not doc[key]:
            raise BridgeError(f"{where}: bad {key} {doc[key]!r}")
    weight = doc["weight"]
    if not isinstance(weight, (int, float)) or isinstance(weight, bool):
        raise BridgeError(f"{where}: bad weight {weight!r}")
    if not 0 < float(weight) <= 1:
        raise BridgeError(f"{where}: weight {weight!r} outside (0, 1]")
    example = TrainingExample(
        epoch=epoch,
        pair_id=pair_id,
        task=doc["task"],
        origin=doc["origin"],
        weight=float(weight),
        src=_token_list(doc, "src", where),
        tgt_ctx=_token_list(doc, "tgt_ctx", where),
        tgt_lbl=_token_list(doc, "tgt_lbl", where),
    )
    if len(example.tgt_ctx) != len(example.tgt_lbl):
        raise BridgeError(
            f"{where}: tgt_ctx has {len(example.tgt_ctx)} tokens, "
            f"tgt_lbl has {len(example.tgt_lbl)}"
        )
    return example


def _lines(path: str | Path) -> Iterator[tuple[int, dict]]:
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise BridgeError(
                        f"{path}: line {lineno}: invalid JSON: {exc}"
                    ) from exc
                if not isinstance(doc, dict):
                    raise BridgeError(f"{path}: line {lineno}: expected an object")
                yield lineno, doc
    except OSError as exc:
        raise BridgeError(f"cannot read stream {path}: {exc}") from exc


def consume_stream(path: str | Path) -> Iterator[TrainingExample]:
    """Yield every sample in file order, skipping batch markers."""
    for lineno, doc in _lines(path):
        if doc.get("batch_end"):
            continue
        yield _parse_sample(doc, f"{path}: line {lineno}")


def read_batches(path: str | Path) -> Iterator[list[TrainingExample]]:
    """Yield samples grouped by the stream's batch markers.

    Marker token counts are checked against the enclosed labels; samples
    after the last marker would be a truncated write and raise.
    """
    pending: list[TrainingExample] = []
    for lineno, doc in _lines(path):
        where = f"{path}: line {lineno}"
        if doc.get("batch_end"):
            count = doc.get("token_count")
            if not isinstance(count, int) or isinstance(count, bool) or count < 0:
                raise BridgeError(f"{where}: bad token_count {count!r}")
            have = sum(len(example.tgt_lbl) for example in pending)
            if have != count:
                raise BridgeError(
                    f"{where}: marker says {count} tokens, batch holds {have}"
                )
            if not pending:
                raise BridgeError(f"{where}: empty batch")
            yield pending
            pending = []
            continue
        pending.append(_parse_sample(doc, where))
    if pending:
        raise BridgeError(f"{path}: {len(pending)} samples after the last marker")
