"""Input validation helpers used across modules and the estimator layer."""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def check_token_seq(tokens, what: str = "token sequence") -> tuple[str, ...]:
    """Validate and freeze a sequence of tokens.

    Tokens must be non-empty strings without internal whitespace (they must
    survive a split/join round trip through the line-based file formats).
    """
    seq = tuple(tokens)
    if not seq:
        raise ValueError(f"{what} must not be empty")
    for tok in seq:
        if not isinstance(tok, str):
            raise ValueError(f"{what} contains a non-string token: {tok!r}")
        if not tok or tok.split() != [tok]:
            raise ValueError(f"{what} contains an empty or whitespace token: {tok!r}")
    return seq


def check_alpha(alpha) -> Fraction:
    """Validate a degradation ratio and return it as an exact fraction.

    Floats are interpreted through their shortest decimal repr so that
    floor(alpha * m) matches exact decimal arithmetic (0.3 * 20 == 6).
    """
    if isinstance(alpha, Fraction):
        frac = alpha
    elif isinstance(alpha, int):
        frac = Fraction(alpha)
    elif isinstance(alpha, float):
        frac = Fraction(str(alpha))
    elif isinstance(alpha, str):
        frac = Fraction(alpha)
    else:
        raise ValueError(f"alpha must be a number, got {type(alpha).__name__}")
    if not 0 <= frac <= 1:
        raise ValueError(f"alpha must be within [0, 1], got {alpha}")
    return frac


def check_positive_int(value, what: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{what} must be a positive integer, got {value!r}")
    return value


def check_probability_matrix(rows, what: str = "probability matrix") -> np.ndarray:
    """Validate a [tokens x draws] matrix of probabilities."""
    mat = np.asarray(rows, dtype=float)
    if mat.ndim != 2:
        raise ValueError(f"{what} must be two-dimensional, got shape {mat.shape}")
    if mat.shape[1] < 2:
        raise ValueError(f"{what} needs at least 2 draws per token, got {mat.shape[1]}")
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{what} contains non-finite values")
    if mat.min() < 0.0 or mat.max() > 1.0:
        raise ValueError(f"{what} has values outside [0, 1]")
    return mat


def check_vector(values, what: str = "vector") -> np.ndarray:
    vec = np.asarray(values, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise ValueError(f"{what} must be a non-empty one-dimensional array")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{what} contains non-finite values")
    return vec
