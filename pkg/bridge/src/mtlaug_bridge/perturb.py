"""Perturbation dumps: teacher-forced probabilities under embedding noise.

For every test sentence the model is run N times with Gaussian noise on
the source token embeddings and N times with noise on the target prefix
embeddings (the BOS slot included, since it conditions the first token).
Each token's noise draw uses sigma = lambda * ||embedding||.  Output is
one JSON object per sentence with p_src and p_tgt matrices of shape
[tokens x N], the format the stream producer's analysis commands read.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import torch

from .model import Seq2SeqModel, Vocabulary


def _noise(embeddings: torch.Tensor, lam: float,
           generator: torch.Generator) -> torch.Tensor:
    """Per-token isotropic Gaussian scaled to the token's embedding norm."""
    sigma = lam * embeddings.norm(dim=-1, keepdim=True)
    return torch.randn(
        embeddings.shape, generator=generator, dtype=embeddings.dtype
    ) * sigma


def perturbed_probabilities(model: Seq2SeqModel, vocab: Vocabulary,
                            src: Sequence[str], tgt: Sequence[str],
                            n_draws: int, lam: float,
                            generator: torch.Generator,
                            ) -> tuple[torch.Tensor, torch.Tensor]:
    """(p_src, p_tgt) matrices of shape [len(tgt) x n_draws]."""
    if n_draws < 1:
        raise ValueError(f"n_draws must be >= 1, got {n_draws}")
    if lam < 0:
        raise ValueError(f"lambda must be non-negative, got {lam}")
    src_ids = vocab.encode(src)
    tgt_ids = vocab.encode(tgt)
    with torch.no_grad():
        src_emb = model.src_embedding(src_ids)
        tgt_emb = model.tgt_embedding(model.decoder_inputs(tgt_ids))
    src_cols = [
        model.label_probabilities(
            src_ids, tgt_ids, src_noise=_noise(src_emb, lam, generator)
        )
        for _ in range(n_draws)
    ]
    tgt_cols = [
        model.label_probabilities(
            src_ids, tgt_ids, tgt_noise=_noise(tgt_emb, lam, generator)
        )
        for _ in range(n_draws)
    ]
    p_src = torch.stack(src_cols, dim=1)
    p_tgt = torch.stack(tgt_cols, dim=1)
    for name, matrix in (("p_src", p_src), ("p_tgt", p_tgt)):
        if not bool(((matrix >= 0) & (matrix <= 1)).all()):
            raise ValueError(f"{name} left [0, 1]; the model is broken")
    return p_src, p_tgt


def dump_perturbations(model: Seq2SeqModel, vocab: Vocabulary,
                       pairs: Sequence[tuple[Sequence[str], Sequence[str]]],
                       n_draws: int, lam: float, seed: int,
                       path: str | Path) -> int:
    """Write one perturbation record per (src, tgt) pair; returns the count."""
    generator = torch.Generator().manual_seed(seed)
    with open(path, "w", encoding="utf-8") as handle:
        for sentence_id, (src, tgt) in enumerate(pairs):
            p_src, p_tgt = perturbed_probabilities(
                model, vocab, src, tgt, n_draws, lam, generator
            )
            doc = {
                "id": sentence_id,
                "tokens": list(tgt),
                "p_src": [[float(v) for v in row] for row in p_src],
                "p_tgt": [[float(v) for v in row] for row in p_tgt],
            }
            handle.write(json.dumps(doc, ensure_ascii=False,
                                    separators=(",", ":")) + "\n")
    return len(pairs)
