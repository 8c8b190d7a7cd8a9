"""Deterministic multi-task data augmentation for seq2seq training corpora.

The toolkit turns a word-aligned parallel corpus into a training stream
that mixes every sentence pair with deliberately non-fluent variants of
itself (swapped, masked, copied, reversed, monotonized or word-replaced
targets), each marked with a task token and weighted so a pair's samples
sum to one.  Streams are regenerated per epoch from hash-derived random
streams, so results are reproducible bit-for-bit at any worker count.
Companion analysis tools summarize where a trained model draws its
information from and how close its output stays to references.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .alignment import (
    AlignmentSet,
    BilingualLexicon,
    build_lexicon,
    intersect,
    parse_pharaoh,
    target_to_source,
)
from .analysis import (
    PerturbationDump,
    PositionCurve,
    SimilarityRecord,
    contribution_variance,
    corpus_source_share,
    cosine,
    default_grid,
    evaluate_polynomial,
    fit_polynomial,
    kde,
    perturbation_sigma,
    position_curve,
    relative_source_contribution,
    similarity_values,
)
from .corpus import ParallelPair, filter_pairs, read_parallel
from .errors import (
    AlignmentError,
    AnalysisError,
    CorpusError,
    DataError,
    MtlaugError,
    StreamError,
    SubwordError,
)
from .rng import HashStream, RandomStream, derive_stream
from .stream import (
    Batch,
    StreamConfig,
    StreamEntry,
    StreamResources,
    combine_bt,
    epoch_stream,
    make_batches,
    write_stream,
)
from .subword import MergeTable, apply_bpe, learn_bpe, undo_bpe
from .transforms import (
    AugmentedSample,
    t_mono,
    t_replace,
    t_reverse,
    t_source,
    t_swap,
    t_unk,
)

__all__ = [
    "__version__",
    "AlignmentSet", "BilingualLexicon", "build_lexicon", "intersect",
    "parse_pharaoh", "target_to_source",
    "PerturbationDump", "PositionCurve", "SimilarityRecord",
    "contribution_variance", "corpus_source_share", "cosine",
    "default_grid", "evaluate_polynomial", "fit_polynomial", "kde",
    "perturbation_sigma", "position_curve",
    "relative_source_contribution", "similarity_values",
    "ParallelPair", "filter_pairs", "read_parallel",
    "AlignmentError", "AnalysisError", "CorpusError", "DataError",
    "MtlaugError", "StreamError", "SubwordError",
    "HashStream", "RandomStream", "derive_stream",
    "Batch", "StreamConfig", "StreamEntry", "StreamResources",
    "combine_bt", "epoch_stream", "make_batches", "write_stream",
    "MergeTable", "apply_bpe", "learn_bpe", "undo_bpe",
    "AugmentedSample", "t_mono", "t_replace", "t_reverse",
    "t_source", "t_swap", "t_unk",
]
