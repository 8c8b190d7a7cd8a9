"""Deterministic, independently seeded random streams.

Every (seed, epoch, pair, transform) combination gets its own stream
keyed by a blake2b hash, so samples can be generated in any order, on
any number of workers, on any platform, and come out identical.  The
stream itself is a counter-mode blake2b generator: block i of the
stream is blake2b(key || i) and is consumed as 64-bit words.
"""

from __future__ import annotations

import struct
from hashlib import blake2b
from typing import MutableSequence, Protocol

_PERSON = b"mtlaug.stream.v1"
_U64_MAX = 2**64

# pair_id passed to derive_stream for decisions scoped to a whole corpus
# rather than a single pair (the per-epoch shuffle)
CORPUS_SCOPE = -1


class RandomStream(Protocol):
    """The draw operations transformations rely on."""

    def randrange(self, n: int) -> int: ...

    def sample(self, n: int, k: int) -> list[int]: ...


class HashStream:
    """Counter-mode blake2b random stream over a fixed key."""

    def __init__(self, key: bytes) -> None:
        self._key = bytes(key)
        self._block = 0
        self._words: list[int] = []
        self._next = 0

    def _u64(self) -> int:
        if self._next >= len(self._words):
            digest = blake2b(
                self._key + struct.pack("<Q", self._block), digest_size=64
            ).digest()
            self._block += 1
            self._words = list(struct.unpack("<8Q", digest))
            self._next = 0
        word = self._words[self._next]
        self._next += 1
        return word

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n), by rejection so there is no modulo bias."""
        if n < 1:
            raise ValueError(f"randrange needs n >= 1, got {n}")
        if n == 1:
            return 0
        limit = (_U64_MAX // n) * n
        while True:
            word = self._u64()
            if word < limit:
                return word % n

    def sample(self, n: int, k: int) -> list[int]:
        """k distinct integers from [0, n), uniformly, in draw order.

        Partial Fisher-Yates over a sparse mapping, so it is O(k) even
        for large n.
        """
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} values from range({n})")
        swapped: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.randrange(n - i)
            out.append(swapped.get(j, j))
            swapped[j] = swapped.get(i, i)
        return out

    def shuffle(self, seq: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]


def derive_stream(seed: int, epoch: int, pair_id: int, transform_id: str) -> HashStream:
    """Derive the stream for one (seed, epoch, pair, transform) cell.

    seed is reduced modulo 2**64; epoch must be non-negative; pair_id may
    be CORPUS_SCOPE (-1) for corpus-level decisions.
    """
    if epoch < 0:
        raise ValueError(f"epoch must be non-negative, got {epoch}")
    if pair_id < CORPUS_SCOPE:
        raise ValueError(f"pair_id must be >= {CORPUS_SCOPE}, got {pair_id}")
    message = (
        struct.pack("<Qqq", seed % _U64_MAX, epoch, pair_id)
        + transform_id.encode("utf-8")
    )
    key = blake2b(message, digest_size=32, person=_PERSON).digest()
    return HashStream(key)
