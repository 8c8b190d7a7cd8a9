"""Model and vocabulary behavior."""

from __future__ import annotations

import pytest
import torch

from mtlaug_bridge import (
    BOS,
    OOV,
    BridgeError,
    Seq2SeqModel,
    build_vocabulary,
    load_model,
    save_model,
)


class TestVocabulary:
    def test_reserved_slots_and_sorted_rest(self):
        vocab = build_vocabulary([("b", "a"), ("c",)])
        assert vocab.index == {BOS: 0, OOV: 1, "a": 2, "b": 3, "c": 4}

    def test_equal_corpora_map_equally(self):
        a = build_vocabulary([("x", "y"), ("z",)])
        b = build_vocabulary([("z", "x"), ("y",)])
        assert a.index == b.index

    def test_unknown_tokens_map_to_oov(self):
        vocab = build_vocabulary([("a",)])
        ids = vocab.encode(("a", "never-seen"))
        assert ids.tolist() == [vocab.index["a"], vocab.index[OOV]]


class TestSeq2SeqModel:
    def make(self, vocab_size=9):
        torch.manual_seed(0)
        return Seq2SeqModel(vocab_size, emb=8, hidden=12)

    def test_decoder_inputs_shift_right(self):
        model = self.make()
        ids = torch.tensor([4, 5, 6])
        assert model.decoder_inputs(ids).tolist() == [0, 4, 5]

    def test_logits_shape(self):
        model = self.make()
        out = model.logits(torch.tensor([1, 2, 3, 4]), torch.tensor([5, 6]))
        assert out.shape == (2, 9)

    def test_label_probabilities_are_probabilities(self):
        model = self.make()
        probs = model.label_probabilities(
            torch.tensor([1, 2, 3]), torch.tensor([4, 5, 6, 7])
        )
        assert probs.shape == (4,)
        assert bool(((probs > 0) & (probs < 1)).all())

    def test_noise_changes_probabilities(self):
        model = self.make()
        src = torch.tensor([1, 2, 3])
        tgt = torch.tensor([4, 5])
        base = model.label_probabilities(src, tgt)
        noisy = model.label_probabilities(
            src, tgt, src_noise=torch.full((3, 8), 0.5)
        )
        assert not torch.equal(base, noisy)

    def test_dimension_validation(self):
        with pytest.raises(ValueError, match="dimensions"):
            Seq2SeqModel(2)


class TestSaveLoad:
    def test_roundtrip_preserves_outputs(self, tmp_path):
        torch.manual_seed(3)
        vocab = build_vocabulary([("a", "b", "c", "d")])
        model = Seq2SeqModel(len(vocab), emb=8, hidden=12)
        path = tmp_path / "model.pt"
        save_model(model, vocab, path)
        loaded, loaded_vocab = load_model(path)
        assert loaded_vocab.index == vocab.index
        src, tgt = vocab.encode(("a", "b")), vocab.encode(("c", "d"))
        assert torch.equal(
            model.label_probabilities(src, tgt),
            loaded.label_probabilities(src, tgt),
        )

    def test_missing_file(self, tmp_path):
        with pytest.raises(BridgeError, match="cannot load"):
            load_model(tmp_path / "absent.pt")

    def test_wrong_payload(self, tmp_path):
        path = tmp_path / "model.pt"
        torch.save({"state": {}}, path)
        with pytest.raises(BridgeError, match="lacks"):
            load_model(path)
