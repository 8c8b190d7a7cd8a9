"""Deterministic sentence embeddings and similarity record dumps.

The hashing embedder stands in for a real multilingual sentence encoder
at desk scale: each token hashes to a fixed pseudo-random vector that is
rotated by the token's position, and the sentence is the normalized mean
of those vectors, so reordering a sentence moves its embedding.  Any
encoder with the same call shape is a drop-in.
"""

from __future__ import annotations

import hashlib
import json
import struct
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import BridgeError

Embedder = Callable[[Sequence[str]], np.ndarray]


def _token_vector(token: str, dim: int) -> np.ndarray:
    """Pseudo-random unit-scale vector derived from the token bytes."""
    values = np.empty(dim)
    filled = 0
    counter = 0
    while filled < dim:
        digest = hashlib.blake2b(
            token.encode("utf-8") + struct.pack("<Q", counter), digest_size=32
        ).digest()
        for offset in range(0, 32, 8):
            if filled == dim:
                break
            (word,) = struct.unpack_from("<Q", digest, offset)
            # map to (-1, 1), never exactly zero
            values[filled] = (word + 0.5) / 2.0**63 - 1.0
            filled += 1
        counter += 1
    return values


class HashingEmbedder:
    """Deterministic token-hash sentence embedder."""

    def __init__(self, dim: int = 64):
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = dim
        self._cache: dict[str, np.ndarray] = {}

    def __call__(self, tokens: Sequence[str]) -> np.ndarray:
        if not tokens:
            raise ValueError("cannot embed an empty sentence")
        total = np.zeros(self.dim)
        for position, token in enumerate(tokens):
            vector = self._cache.get(token)
            if vector is None:
                vector = _token_vector(token, self.dim)
                self._cache[token] = vector
            total += np.roll(vector, position % self.dim)
        total /= len(tokens)
        norm = float(np.linalg.norm(total))
        if norm == 0.0:
            raise BridgeError(f"degenerate embedding for {tokens!r}")
        return total / norm


def dump_similarities(hypotheses: Sequence[Sequence[str]],
                      references: Sequence[Sequence[str]],
                      embedder: Embedder, path: str | Path) -> int:
    """Write one embedding record per sentence pair; returns the count."""
    if len(hypotheses) != len(references):
        raise BridgeError(
            f"{len(hypotheses)} hypotheses but {len(references)} references"
        )
    with open(path, "w", encoding="utf-8") as handle:
        for sentence_id, (hyp, ref) in enumerate(zip(hypotheses, references)):
            doc = {
                "id": sentence_id,
                "hyp": [float(v) for v in embedder(hyp)],
                "ref": [float(v) for v in embedder(ref)],
            }
            handle.write(json.dumps(doc, separators=(",", ":")) + "\n")
    return len(hypotheses)
