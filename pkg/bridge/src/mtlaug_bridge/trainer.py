"""Weighted training loop over a serialized augmentation stream."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .errors import BridgeError
from .model import Seq2SeqModel, Vocabulary, build_vocabulary
from .stream_reader import TrainingExample, consume_stream, read_batches


@dataclass(frozen=True, slots=True)
class BridgeConfig:
    """Run description: stream location, model knobs, perturbation knobs."""

    stream: str | Path
    emb: int = 32
    hidden: int = 48
    n_draws: int = 50
    lam: float = 0.01
    embed_dim: int = 64
    seed: int = 0
    learning_rate: float = 0.01

    def __post_init__(self) -> None:
        if self.n_draws < 2:
            raise ValueError(f"n_draws must be >= 2, got {self.n_draws}")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        for name in ("emb", "hidden", "embed_dim"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")


def example_loss(model: Seq2SeqModel, vocab: Vocabulary,
                 example: TrainingExample) -> torch.Tensor:
    """Weighted mean token cross-entropy for one sample.

    The decoder reads the context sequence (which may carry placeholder
    masks) while the loss targets the label sequence.
    """
    src_ids = vocab.encode(example.src)
    ctx_ids = vocab.encode(example.tgt_ctx)
    lbl_ids = vocab.encode(example.tgt_lbl)
    logits = model.logits(src_ids, ctx_ids)
    per_token = nn.functional.cross_entropy(logits, lbl_ids, reduction="mean")
    return example.weight * per_token


def train_on_stream(config: BridgeConfig, steps: int,
                    model: Seq2SeqModel | None = None,
                    vocab: Vocabulary | None = None,
                    ) -> tuple[Seq2SeqModel, Vocabulary, list[float]]:
    """Run up to `steps` optimizer steps, one per stream batch.

    Returns the model, its vocabulary and the per-step loss history.
    The stream is re-read from the start when it runs out before the
    step budget is spent.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    torch.manual_seed(config.seed)
    if vocab is None:
        vocab = build_vocabulary(
            example.src + example.tgt_ctx + example.tgt_lbl
            for example in consume_stream(config.stream)
        )
        if len(vocab) <= 2:
            raise BridgeError(f"stream {config.stream} holds no samples")
    if model is None:
        model = Seq2SeqModel(len(vocab), config.emb, config.hidden)
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    history: list[float] = []
    while len(history) < steps:
        progressed = False
        for batch in read_batches(config.stream):
            progressed = True
            optimizer.zero_grad()
            loss = torch.stack(
                [example_loss(model, vocab, example) for example in batch]
            ).mean()
            loss.backward()
            optimizer.step()
            history.append(float(loss.detach()))
            if len(history) == steps:
                break
        if not progressed:
            raise BridgeError(f"stream {config.stream} holds no batches")
    model.eval()
    return model, vocab, history
