"""Estimator-style wrappers around the functional core.

These follow the fit/transform convention: constructors only store
parameters, fit() learns state into trailing-underscore attributes, and
get_params/set_params work with model-selection utilities.  They are a
convenience layer; the file formats and the command line do not depend
on them.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import analysis
from .alignment import AlignmentSet, BilingualLexicon, build_lexicon
from .corpus import ParallelPair
from .stream import (
    StreamConfig,
    StreamEntry,
    StreamResources,
    epoch_stream,
    make_batches,
)
from .subword import apply_bpe, learn_bpe, undo_bpe
from .tokens import DEFAULT_RESERVED
from .transforms import AugmentedSample


class SubwordEncoder(BaseEstimator, TransformerMixin):
    """Learn a merge table on fit, segment token sequences on transform."""

    def __init__(self, num_merges: int = 10000, separator: str = "@@"):
        self.num_merges = num_merges
        self.separator = separator

    def fit(self, X: Iterable[Sequence[str] | str], y=None) -> "SubwordEncoder":
        self.merges_ = learn_bpe(
            X, self.num_merges, separator=self.separator
        )
        return self

    def transform(self, X: Iterable[Sequence[str]]) -> list[tuple[str, ...]]:
        check_is_fitted(self, "merges_")
        return [apply_bpe(seq, self.merges_) for seq in X]

    def inverse_transform(self, X: Iterable[Sequence[str]]) -> list[tuple[str, ...]]:
        return [undo_bpe(seq, self.separator) for seq in X]


class LexiconExtractor(BaseEstimator):
    """Extract the most-frequent aligned target word per source word."""

    def fit(self, X: Sequence[ParallelPair],
            alignments: Mapping[int, AlignmentSet] | None = None,
            ) -> "LexiconExtractor":
        if alignments is None:
            raise ValueError("LexiconExtractor.fit needs alignments")
        self.lexicon_ = build_lexicon(X, alignments)
        return self

    def lookup(self, source: str) -> tuple[str, int] | None:
        check_is_fitted(self, "lexicon_")
        return self.lexicon_.lookup(source)


class MultiTaskAugmenter(BaseEstimator, TransformerMixin):
    """Bind stream parameters and side resources, then generate samples."""

    def __init__(self, transforms=(), seed: int = 0, epoch: int = 0,
                 max_batch_tokens: int = 4000, bt_mode: str = "plain",
                 phase: str = "augment"):
        self.transforms = transforms
        self.seed = seed
        self.epoch = epoch
        self.max_batch_tokens = max_batch_tokens
        self.bt_mode = bt_mode
        self.phase = phase

    def _config(self) -> StreamConfig:
        return StreamConfig(
            transforms=tuple(self.transforms),
            seed=self.seed,
            max_batch_tokens=self.max_batch_tokens,
            bt_mode=self.bt_mode,
            phase=self.phase,
        )

    def fit(self, X: Sequence[ParallelPair | StreamEntry], y=None, *,
            alignments: Mapping[int, AlignmentSet] | None = None,
            one_to_one: Mapping[int, AlignmentSet] | None = None,
            lexicon: BilingualLexicon | None = None) -> "MultiTaskAugmenter":
        config = self._config()  # validates the parameters
        resources = StreamResources(
            alignments=alignments, one_to_one=one_to_one, lexicon=lexicon
        )
        # fail fast on missing resources instead of failing mid-stream
        next(epoch_stream(list(X)[:1], config, 0, resources), None)
        self.entries_ = list(X)
        self.resources_ = resources
        return self

    def transform(self, X) -> list[AugmentedSample]:
        """Samples for the given pairs at the configured epoch."""
        check_is_fitted(self, "resources_")
        return list(epoch_stream(X, self._config(), self.epoch, self.resources_))

    def iter_epoch(self, epoch: int):
        check_is_fitted(self, "entries_")
        return epoch_stream(self.entries_, self._config(), epoch, self.resources_)

    def iter_batches(self, epoch: int):
        return make_batches(self.iter_epoch(epoch), self.max_batch_tokens)


class GaussianKde(BaseEstimator):
    """Gaussian kernel density estimate with a fixed bandwidth."""

    def __init__(self, bandwidth: float = analysis.DEFAULT_BANDWIDTH,
                 grid_points: int = analysis.DEFAULT_GRID_POINTS):
        self.bandwidth = bandwidth
        self.grid_points = grid_points

    def fit(self, X: Sequence[float], y=None) -> "GaussianKde":
        self.samples_ = np.asarray(X, dtype=float)
        self.grid_, self.densities_ = analysis.kde(
            self.samples_, self.bandwidth,
            analysis.default_grid(self.samples_, self.bandwidth, self.grid_points),
        )
        return self

    def evaluate(self, grid: Sequence[float]) -> np.ndarray:
        check_is_fitted(self, "samples_")
        _, densities = analysis.kde(self.samples_, self.bandwidth, grid)
        return densities


class PolynomialTrend(BaseEstimator):
    """Least-squares polynomial fit with ascending-power coefficients."""

    def __init__(self, degree: int = analysis.DEFAULT_DEGREE):
        self.degree = degree

    def fit(self, X: Sequence[float], y: Sequence[float]) -> "PolynomialTrend":
        self.coefficients_ = analysis.fit_polynomial(X, y, self.degree)
        return self

    def predict(self, X: Sequence[float]) -> np.ndarray:
        check_is_fitted(self, "coefficients_")
        return analysis.evaluate_polynomial(self.coefficients_, X)
