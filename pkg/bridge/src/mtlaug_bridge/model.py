"""Tiny GRU encoder-decoder with teacher-forced probability extraction.

This is a reference integration, deliberately small enough that a full
train/dump cycle runs on a laptop CPU in well under two minutes.  Noise
injection happens on the raw token embeddings, before any further
processing.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import torch
from torch import nn

from .errors import BridgeError

BOS = "<bos>"
OOV = "<oov>"


@dataclass(frozen=True, slots=True)
class Vocabulary:
    """Deterministic token-to-index map with reserved BOS and OOV slots."""

    index: dict[str, int]

    def __len__(self) -> int:
        return len(self.index)

    def encode(self, tokens: Sequence[str]) -> torch.Tensor:
        oov = self.index[OOV]
        return torch.tensor(
            [self.index.get(tok, oov) for tok in tokens], dtype=torch.long
        )


def build_vocabulary(token_seqs: Iterable[Sequence[str]]) -> Vocabulary:
    """Sorted vocabulary over all tokens, so equal corpora map equally."""
    seen: set[str] = set()
    for seq in token_seqs:
        seen.update(seq)
    index = {BOS: 0, OOV: 1}
    for token in sorted(seen.difference(index)):
        index[token] = len(index)
    return Vocabulary(index)


class Seq2SeqModel(nn.Module):
    """GRU encoder feeding a GRU decoder through its initial hidden state."""

    def __init__(self, vocab_size: int, emb: int = 32, hidden: int = 48):
        super().__init__()
        if vocab_size < 3 or emb < 1 or hidden < 1:
            raise ValueError("model dimensions must be positive")
        self.vocab_size = vocab_size
        self.emb = emb
        self.hidden = hidden
        self.src_embedding = nn.Embedding(vocab_size, emb)
        self.tgt_embedding = nn.Embedding(vocab_size, emb)
        self.encoder = nn.GRU(emb, hidden, batch_first=True)
        self.decoder = nn.GRU(emb, hidden, batch_first=True)
        self.project = nn.Linear(hidden, vocab_size)

    def decoder_inputs(self, ctx_ids: torch.Tensor) -> torch.Tensor:
        """Teacher-forced decoder input ids: BOS then all but the last token."""
        bos = torch.zeros(1, dtype=torch.long)
        return torch.cat([bos, ctx_ids[:-1]])

    def logits(self, src_ids: torch.Tensor, ctx_ids: torch.Tensor,
               src_noise: torch.Tensor | None = None,
               tgt_noise: torch.Tensor | None = None) -> torch.Tensor:
        """Per-position vocabulary logits for one sample, shape [len, vocab]."""
        src_emb = self.src_embedding(src_ids)
        if src_noise is not None:
            src_emb = src_emb + src_noise
        _, state = self.encoder(src_emb.unsqueeze(0))
        tgt_emb = self.tgt_embedding(self.decoder_inputs(ctx_ids))
        if tgt_noise is not None:
            tgt_emb = tgt_emb + tgt_noise
        output, _ = self.decoder(tgt_emb.unsqueeze(0), state)
        return self.project(output.squeeze(0))

    def label_probabilities(self, src_ids: torch.Tensor, tgt_ids: torch.Tensor,
                            src_noise: torch.Tensor | None = None,
                            tgt_noise: torch.Tensor | None = None,
                            ) -> torch.Tensor:
        """p(y_j | y_<j, x) for each position of the reference target."""
        with torch.no_grad():
            probs = torch.softmax(
                self.logits(src_ids, tgt_ids, src_noise, tgt_noise), dim=-1
            )
        return probs.gather(1, tgt_ids.unsqueeze(1)).squeeze(1)


def save_model(model: Seq2SeqModel, vocab: Vocabulary, path: str | Path) -> None:
    torch.save(
        {
            "state": model.state_dict(),
            "index": vocab.index,
            "emb": model.emb,
            "hidden": model.hidden,
        },
        path,
    )


def load_model(path: str | Path) -> tuple[Seq2SeqModel, Vocabulary]:
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except (OSError, RuntimeError, ValueError) as exc:
        raise BridgeError(f"cannot load model {path}: {exc}") from exc
    for key in ("state", "index", "emb", "hidden"):
        if key not in payload:
            raise BridgeError(f"model file {path} lacks {key!r}")
    vocab = Vocabulary(payload["index"])
    model = Seq2SeqModel(len(vocab), payload["emb"], payload["hidden"])
    model.load_state_dict(payload["state"])
    model.eval()
    return model, vocab
