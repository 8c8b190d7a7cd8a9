"""Importable test helpers: the worked-example pair and a scripted random stream."""

from __future__ import annotations

from mtlaug import ParallelPair


class ScriptedStream:
    """RandomStream stand-in that replays prepared draws."""

    def __init__(self, samples=(), randranges=()):
        self._samples = list(samples)
        self._randranges = list(randranges)

    def sample(self, n: int, k: int) -> list[int]:
        if not self._samples:
            raise AssertionError("scripted stream ran out of sample draws")
        out = list(self._samples.pop(0))
        assert len(out) == k and all(0 <= v < n for v in out)
        return out

    def randrange(self, n: int) -> int:
        if not self._randranges:
            raise AssertionError("scripted stream ran out of randrange draws")
        value = self._randranges.pop(0)
        assert 0 <= value < n
        return value


REFERENCE_SRC = ("Es", "gibt", "andere", "Möglichkeiten", ",",
                 "die", "Pyramide", "zu", "durchbrechen", ".")
REFERENCE_TGT = ("There", "'s", "other", "ways", "of",
                 "breaking", "the", "pyramid", ".")
REFERENCE_LINKS = frozenset(
    {(0, 1), (1, 0), (2, 2), (3, 3), (5, 6), (6, 7), (7, 4), (8, 5), (9, 8)}
)


def make_pairs(count: int, src_len: int = 6, tgt_len: int = 5,
               origin: str = "parallel") -> list[ParallelPair]:
    """Synthetic pairs with position-unique tokens."""
    return [
        ParallelPair(
            i,
            tuple(f"s{i}x{j}" for j in range(src_len)),
            tuple(f"t{i}x{j}" for j in range(tgt_len)),
            origin,
        )
        for i in range(count)
    ]
