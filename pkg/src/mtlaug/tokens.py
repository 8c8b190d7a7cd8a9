"""Task names, task tokens and reserved symbols.

Every sample in a training stream carries a task name ("original" or the
name of the transformation that produced it, with a "bt+" prefix for
augmented back-translated data).  Task names map to task *tokens*, the
literal strings prepended to source sentences so the model can condition
on the generating task.
"""

from __future__ import annotations

ORIGINAL = "original"
SWAP = "swap"
UNK = "unk"
SOURCE = "source"
REVERSE = "reverse"
MONO = "mono"
REPLACE = "replace"
BT = "bt"

TRANSFORM_NAMES: tuple[str, ...] = (SWAP, UNK, SOURCE, REVERSE, MONO, REPLACE)

# transforms that draw random numbers (the rest are pure functions of the pair)
RANDOM_TRANSFORMS: frozenset[str] = frozenset({SWAP, UNK, REPLACE})

# transforms that take a degradation ratio alpha
ALPHA_TRANSFORMS: frozenset[str] = frozenset({SWAP, UNK, REPLACE})

# placeholder written into decoder context positions by the unk transform
UNK_TOKEN = "UNK"


def default_task_tokens() -> dict[str, str]:
    """Default task-name -> task-token map, covering bt combinations."""
    tokens = {ORIGINAL: "<mtl:orig>", BT: "<mtl:bt>"}
    for name in TRANSFORM_NAMES:
        tokens[name] = f"<mtl:{name}>"
        tokens[f"{BT}+{name}"] = f"<mtl:bt+{name}>"
    return tokens


def reserved_tokens(task_tokens: dict[str, str] | None = None) -> frozenset[str]:
    """Tokens that subword learning and encoding must leave atomic."""
    if task_tokens is None:
        task_tokens = default_task_tokens()
    return frozenset(task_tokens.values()) | {UNK_TOKEN}


DEFAULT_RESERVED = reserved_tokens()
