"""Statistics over perturbation dumps and embedding similarities.

A perturbation dump records, for each target token of a sentence, the
token's model probability under N independent noisy re-encodings of the
source and (separately) of the target prefix.  The variance of those
probabilities measures how much the token's prediction depends on the
perturbed side; the source share of the two variances says where the
model draws its information from.  Corpus-level summaries report the
source share in percent and fit a polynomial trend over relative target
position.  Embedding similarity records are summarized with a Gaussian
kernel density estimate.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import AnalysisError
from .validation import check_probability_matrix, check_token_seq, check_vector

DEFAULT_BANDWIDTH = 0.06
DEFAULT_DEGREE = 6
DEFAULT_LAMBDA = 0.01
DEFAULT_DRAWS = 50
DEFAULT_GRID_POINTS = 512


def contribution_variance(probs: Sequence[float]) -> float:
    """Population variance of one token's probabilities over the draws.

    Streaming one-pass (Welford) update; the result is checked against a
    two-pass oracle in the test suite.
    """
    count = 0
    mean = 0.0
    m2 = 0.0
    for value in probs:
        value = float(value)
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"probability {value!r} outside [0, 1]")
        count += 1
        delta = value - mean
        mean += delta / count
        m2 += delta * (value - mean)
    if count < 2:
        raise ValueError(f"need at least 2 draws, got {count}")
    return m2 / count


def relative_source_contribution(c_src: float, c_tgt: float) -> float | None:
    """Source share c_src / (c_src + c_tgt), or None when both are zero."""
    if not (math.isfinite(c_src) and math.isfinite(c_tgt)):
        raise ValueError("contributions must be finite")
    if c_src < 0 or c_tgt < 0:
        raise ValueError("contributions must be non-negative")
    total = c_src + c_tgt
    if total == 0:
        return None
    return c_src / total


@dataclass(frozen=True)
class PerturbationDump:
    """Per-token probability draws for one sentence, both perturbation sides."""

    sentence_id: int
    tokens: tuple[str, ...]
    p_src: np.ndarray  # [tokens x draws]
    p_tgt: np.ndarray  # [tokens x draws]

    def __post_init__(self) -> None:
        tokens = check_token_seq(self.tokens, f"dump {self.sentence_id} tokens")
        object.__setattr__(self, "tokens", tokens)
        p_src = check_probability_matrix(self.p_src, f"dump {self.sentence_id} p_src")
        p_tgt = check_probability_matrix(self.p_tgt, f"dump {self.sentence_id} p_tgt")
        if p_src.shape != p_tgt.shape:
            raise ValueError(
                f"dump {self.sentence_id}: p_src shape {p_src.shape} differs "
                f"from p_tgt shape {p_tgt.shape}"
            )
        if p_src.shape[0] != len(tokens):
            raise ValueError(
                f"dump {self.sentence_id}: {len(tokens)} tokens but "
                f"{p_src.shape[0]} probability rows"
            )
        object.__setattr__(self, "p_src", p_src)
        object.__setattr__(self, "p_tgt", p_tgt)


def token_source_shares(dump: PerturbationDump) -> list[float | None]:
    """Per-token source share; None marks tokens with zero total variance."""
    shares: list[float | None] = []
    for row_src, row_tgt in zip(dump.p_src, dump.p_tgt):
        shares.append(
            relative_source_contribution(
                contribution_variance(row_src), contribution_variance(row_tgt)
            )
        )
    return shares


def corpus_source_share(dumps: Iterable[PerturbationDump]) -> tuple[float, float, int]:
    """Corpus mean and population std of the source share, in percent.

    Returns (mean_pct, std_pct, token_count) over all tokens with a
    defined share.
    """
    values: list[float] = []
    for dump in dumps:
        values.extend(v for v in token_source_shares(dump) if v is not None)
    if not values:
        raise AnalysisError("no tokens with nonzero total variance")
    arr = np.asarray(values)
    return float(arr.mean() * 100.0), float(arr.std() * 100.0), len(values)


def relative_position(index: int, length: int) -> float:
    """Position of a 0-based token index within its sentence, in [0, 1]."""
    if not 0 <= index < length:
        raise ValueError(f"index {index} outside sentence of length {length}")
    if length == 1:
        return 0.0
    return index / (length - 1)


def fit_polynomial(x: Sequence[float], y: Sequence[float],
                   degree: int) -> np.ndarray:
    """Least-squares polynomial fit; coefficients in ascending power order.

    Requires at least degree+1 points and a full-rank design; with
    exactly degree+1 distinct points the fit interpolates.
    """
    xs = check_vector(x, "x")
    ys = check_vector(y, "y")
    if xs.shape != ys.shape:
        raise ValueError(f"x and y lengths differ ({xs.size} vs {ys.size})")
    if degree < 0:
        raise ValueError(f"degree must be non-negative, got {degree}")
    if xs.size < degree + 1:
        raise ValueError(
            f"need at least {degree + 1} points for degree {degree}, got {xs.size}"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", np.exceptions.RankWarning)
        coeffs, (_, rank, sv, _) = np.polynomial.polynomial.polyfit(
            xs, ys, degree, full=True
        )
    if rank < degree + 1:
        smallest = sv[-1] if sv[-1] > 0 else np.inf
        raise AnalysisError(
            f"rank-deficient fit (rank {rank} < {degree + 1}); "
            f"condition estimate {sv[0] / smallest:.3e}"
        )
    return np.asarray(coeffs, dtype=float)


def evaluate_polynomial(coefficients: Sequence[float], x) -> np.ndarray:
    return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float),
                                            np.asarray(coefficients, dtype=float))


@dataclass(frozen=True)
class PositionCurve:
    """Polynomial trend of the source share over relative target position."""

    coefficients: tuple[float, ...]
    sample_count: int

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def to_json(self) -> str:
        doc = {
            "degree": self.degree,
            "coefficients": list(self.coefficients),
            "n": self.sample_count,
        }
        return json.dumps(doc, separators=(",", ":"))


def position_curve(dumps: Sequence[PerturbationDump],
                   degree: int = DEFAULT_DEGREE) -> PositionCurve:
    """Fit the source-share-vs-position trend over a dump collection."""
    xs: list[float] = []
    ys: list[float] = []
    for dump in dumps:
        length = len(dump.tokens)
        for index, share in enumerate(token_source_shares(dump)):
            if share is None:
                continue
            xs.append(relative_position(index, length))
            ys.append(share)
    if len(xs) <= degree + 1:
        raise AnalysisError(
            f"need more than {degree + 1} points for a degree-{degree} "
            f"trend, got {len(xs)}"
        )
    coeffs = fit_polynomial(xs, ys, degree)
    return PositionCurve(tuple(float(c) for c in coeffs), len(xs))


def perturbation_sigma(embedding: Sequence[float],
                       lam: float = DEFAULT_LAMBDA) -> float:
    """Noise scale for one embedding: lam times its Euclidean norm."""
    vec = check_vector(embedding, "embedding")
    if lam < 0:
        raise ValueError(f"lam must be non-negative, got {lam}")
    return float(lam * np.linalg.norm(vec))


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity; zero vectors are an error."""
    a = check_vector(u, "u")
    b = check_vector(v, "v")
    if a.shape != b.shape:
        raise ValueError(f"vector lengths differ ({a.size} vs {b.size})")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine similarity of a zero vector is undefined")
    value = float(np.dot(a, b) / (norm_a * norm_b))
    return max(-1.0, min(1.0, value))


def kde(samples: Sequence[float], bandwidth: float = DEFAULT_BANDWIDTH,
        grid: Sequence[float] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian kernel density estimate of samples on a grid.

    Returns (grid, densities).  The default grid spans the samples plus
    six bandwidths on each side, so the estimate integrates to 1 within
    numerical tolerance.
    """
    values = check_vector(samples, "samples")
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    if grid is None:
        xs = default_grid(values, bandwidth)
    else:
        xs = check_vector(grid, "grid")
    norm = 1.0 / (values.size * bandwidth * math.sqrt(2.0 * math.pi))
    densities = np.empty_like(xs)
    chunk = 4096
    for start in range(0, xs.size, chunk):
        block = xs[start:start + chunk, None]
        z = (block - values[None, :]) / bandwidth
        densities[start:start + chunk] = norm * np.exp(-0.5 * z * z).sum(axis=1)
    return xs, densities


def default_grid(samples: Sequence[float], bandwidth: float,
                 points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    values = check_vector(samples, "samples")
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")
    if points < 2:
        raise ValueError(f"need at least 2 grid points, got {points}")
    lo = float(values.min()) - 6.0 * bandwidth
    hi = float(values.max()) + 6.0 * bandwidth
    return np.linspace(lo, hi, points)


@dataclass(frozen=True)
class SimilarityRecord:
    """A hypothesis/reference sentence-embedding pair."""

    sentence_id: int
    hyp: np.ndarray
    ref: np.ndarray

    def __post_init__(self) -> None:
        hyp = check_vector(self.hyp, f"record {self.sentence_id} hyp")
        ref = check_vector(self.ref, f"record {self.sentence_id} ref")
        if hyp.shape != ref.shape:
            raise ValueError(
                f"record {self.sentence_id}: embedding sizes differ "
                f"({hyp.size} vs {ref.size})"
            )
        object.__setattr__(self, "hyp", hyp)
        object.__setattr__(self, "ref", ref)

    def similarity(self) -> float:
        return cosine(self.hyp, self.ref)


def similarity_values(records: Iterable[SimilarityRecord]) -> np.ndarray:
    values = [record.similarity() for record in records]
    if not values:
        raise AnalysisError("no similarity records")
    return np.asarray(values)


def _load_jsonl(path: str | Path) -> Iterable[tuple[int, dict]]:
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, 1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    doc = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise AnalysisError(
                        f"{path}: line {lineno}: invalid JSON: {exc}"
                    ) from exc
                if not isinstance(doc, dict):
                    raise AnalysisError(f"{path}: line {lineno}: expected an object")
                yield lineno, doc
    except OSError as exc:
        raise AnalysisError(f"cannot read {path}: {exc}") from exc


def _require(doc: dict, key: str, path, lineno: int):
    if key not in doc:
        raise AnalysisError(f"{path}: line {lineno}: missing key {key!r}")
    return doc[key]


def load_dumps(path: str | Path) -> list[PerturbationDump]:
    """Read perturbation dumps from JSON lines."""
    dumps = []
    for lineno, doc in _load_jsonl(path):
        try:
            dumps.append(
                PerturbationDump(
                    sentence_id=int(_require(doc, "id", path, lineno)),
                    tokens=tuple(_require(doc, "tokens", path, lineno)),
                    p_src=np.asarray(_require(doc, "p_src", path, lineno), dtype=float),
                    p_tgt=np.asarray(_require(doc, "p_tgt", path, lineno), dtype=float),
                )
            )
        except (TypeError, ValueError) as exc:
            raise AnalysisError(f"{path}: line {lineno}: {exc}") from exc
    if not dumps:
        raise AnalysisError(f"{path}: no dumps found")
    return dumps


def load_similarities(path: str | Path) -> list[SimilarityRecord]:
    """Read hypothesis/reference embedding records from JSON lines."""
    records = []
    for lineno, doc in _load_jsonl(path):
        try:
            records.append(
                SimilarityRecord(
                    sentence_id=int(_require(doc, "id", path, lineno)),
                    hyp=np.asarray(_require(doc, "hyp", path, lineno), dtype=float),
                    ref=np.asarray(_require(doc, "ref", path, lineno), dtype=float),
                )
            )
        except (TypeError, ValueError) as exc:
            raise AnalysisError(f"{path}: line {lineno}: {exc}") from exc
    if not records:
        raise AnalysisError(f"{path}: no records found")
    return records


def save_kde_tsv(grid: Sequence[float], densities: Sequence[float],
                 path: str | Path) -> None:
    """Write "x<TAB>density" lines."""
    xs = check_vector(grid, "grid")
    ds = check_vector(densities, "densities")
    if xs.shape != ds.shape:
        raise ValueError("grid and densities lengths differ")
    with open(path, "w", encoding="utf-8") as handle:
        for x, d in zip(xs, ds):
            handle.write(f"{float(x)!r}\t{float(d)!r}\n")
