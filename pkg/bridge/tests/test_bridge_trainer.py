"""Config validation, weighted losses and the training loop."""

from __future__ import annotations

import pytest
import torch

from bridge_support import marker_line, sample_line
from mtlaug_bridge import (
    BridgeConfig,
    BridgeError,
    Seq2SeqModel,
    TrainingExample,
    build_vocabulary,
    example_loss,
    train_on_stream,
)


class TestBridgeConfig:
    def test_defaults(self):
        config = BridgeConfig(stream="s.jsonl")
        assert config.n_draws == 50
        assert config.lam == 0.01

    @pytest.mark.parametrize(
        "kwargs",
        [{"n_draws": 1}, {"lam": 0.0}, {"lam": -1.0}, {"emb": 0},
         {"hidden": 0}, {"embed_dim": 0}, {"learning_rate": 0.0}],
    )
    def test_invalid_knobs(self, kwargs):
        with pytest.raises(ValueError):
            BridgeConfig(stream="s.jsonl", **kwargs)


def make_example(weight: float) -> TrainingExample:
    return TrainingExample(
        epoch=0, pair_id=0, task="original", origin="parallel", weight=weight,
        src=("<mtl:orig>", "a", "b"), tgt_ctx=("c", "d"), tgt_lbl=("c", "d"),
    )


class TestExampleLoss:
    def test_weight_scales_loss_multiplicatively(self):
        torch.manual_seed(1)
        vocab = build_vocabulary([("<mtl:orig>", "a", "b", "c", "d")])
        model = Seq2SeqModel(len(vocab), emb=8, hidden=12)
        full = float(example_loss(model, vocab, make_example(1.0)).detach())
        quarter = float(example_loss(model, vocab, make_example(0.25)).detach())
        assert quarter == pytest.approx(0.25 * full, rel=1e-6)

    def test_loss_is_positive(self):
        torch.manual_seed(1)
        vocab = build_vocabulary([("<mtl:orig>", "a", "b", "c", "d")])
        model = Seq2SeqModel(len(vocab), emb=8, hidden=12)
        assert float(example_loss(model, vocab, make_example(0.5)).detach()) > 0


class TestTrainOnStream:
    def write_stream(self, tmp_path, lines):
        path = tmp_path / "stream.jsonl"
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return path

    def small_stream(self, tmp_path):
        lines = []
        for pair_id in range(4):
            lines.append(sample_line(pair_id=pair_id, weight=0.5))
            lines.append(
                sample_line(pair_id=pair_id, task="reverse", weight=0.5,
                            tgt_ctx=["y", "x"], tgt_lbl=["y", "x"])
            )
            lines.append(marker_line(4))
        return self.write_stream(tmp_path, lines)

    def test_history_length_and_restart(self, tmp_path):
        path = self.small_stream(tmp_path)  # 4 batches per pass
        config = BridgeConfig(stream=path, emb=8, hidden=12, seed=2)
        _, _, history = train_on_stream(config, steps=10)
        assert len(history) == 10
        assert all(loss > 0 for loss in history)

    def test_same_seed_same_history(self, tmp_path):
        path = self.small_stream(tmp_path)
        config = BridgeConfig(stream=path, emb=8, hidden=12, seed=7)
        _, _, first = train_on_stream(config, steps=6)
        _, _, second = train_on_stream(config, steps=6)
        assert first == second

    def test_vocabulary_covers_stream(self, tmp_path):
        path = self.small_stream(tmp_path)
        config = BridgeConfig(stream=path, emb=8, hidden=12)
        _, vocab, _ = train_on_stream(config, steps=1)
        for token in ("<mtl:orig>", "a", "b", "x", "y"):
            assert token in vocab.index

    def test_empty_stream_rejected(self, tmp_path):
        path = self.write_stream(tmp_path, [])
        config = BridgeConfig(stream=path, emb=8, hidden=12)
        with pytest.raises(BridgeError, match="no samples"):
            train_on_stream(config, steps=1)

    def test_step_budget_validated(self, tmp_path):
        config = BridgeConfig(stream=self.small_stream(tmp_path))
        with pytest.raises(ValueError, match="steps"):
            train_on_stream(config, steps=0)
