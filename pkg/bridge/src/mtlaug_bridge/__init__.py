"""Reference trainer for serialized multi-task augmentation streams.

Consumes the JSONL stream format through the file system only, trains a
deliberately tiny encoder-decoder with the stream's per-sample weights,
and writes the perturbation and similarity dump files the companion
analysis commands consume.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .embed import Embedder, HashingEmbedder, dump_similarities
from .errors import BridgeError
from .model import (
    BOS,
    OOV,
    Seq2SeqModel,
    Vocabulary,
    build_vocabulary,
    load_model,
    save_model,
)
from .perturb import dump_perturbations, perturbed_probabilities
from .stream_reader import TrainingExample, consume_stream, read_batches
from .trainer import BridgeConfig, example_loss, train_on_stream

__all__ = [
    "__version__",
    "Embedder", "HashingEmbedder", "dump_similarities",
    "BridgeError",
    "BOS", "OOV", "Seq2SeqModel", "Vocabulary", "build_vocabulary",
    "load_model", "save_model",
    "dump_perturbations", "perturbed_probabilities",
    "TrainingExample", "consume_stream", "read_batches",
    "BridgeConfig", "example_loss", "train_on_stream",
]
