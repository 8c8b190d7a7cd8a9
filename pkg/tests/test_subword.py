"""Subword merge learning, application and reversal."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mtlaug import MergeTable, SubwordError, apply_bpe, learn_bpe, undo_bpe
from mtlaug.subword import load_merges, save_merges
from mtlaug.tokens import DEFAULT_RESERVED


class TestLearn:
    def test_single_word_repeated(self):
        table = learn_bpe(["ab", "ab", "ab"], 1)
        assert table.merges == (("a", "b</w>"),)

    def test_shared_prefix_before_word_end(self):
        table = learn_bpe(["abc abd abe"], 1)
        assert table.merges == (("a", "b"),)

    def test_stops_when_no_pair_repeats(self):
        table = learn_bpe(["abc", "xyz"], 10)
        assert table.merges == ()

    def test_count_ties_break_lexicographically(self):
        # "ab" and "cd" both occur twice; (a, b</w>) < (c, d</w>)
        table = learn_bpe(["ab cd", "ab cd"], 1)
        assert table.merges == (("a", "b</w>"),)

    def test_merge_count_cap(self):
        table = learn_bpe(["abcd"] * 5, 2)
        assert len(table) == 2

    def test_learned_prefix_property_small(self):
        corpus = ["the quick brown fox", "the quick red fox", "the slow fox"]
        full = learn_bpe(corpus, 12)
        for k in range(len(full) + 1):
            assert learn_bpe(corpus, k).merges == full.merges[:k]

    def test_reserved_tokens_excluded(self):
        table = learn_bpe(["UNK UNK UNK ab ab"], 10)
        assert all("U" not in left + right for left, right in table.merges)

    def test_separator_in_token_rejected(self):
        with pytest.raises(SubwordError, match="separator"):
            learn_bpe(["foo@@ bar"], 1)

    def test_empty_corpus_rejected(self):
        with pytest.raises(SubwordError, match="empty"):
            learn_bpe([], 1)
        with pytest.raises(SubwordError, match="empty"):
            learn_bpe(["UNK"], 1)  # only reserved tokens

    def test_negative_merges_rejected(self):
        with pytest.raises(ValueError):
            learn_bpe(["ab"], -1)

    def test_accepts_token_sequences(self):
        assert learn_bpe([("ab", "ab")], 1).merges == (("a", "b</w>"),)


class TestMergeTable:
    def test_duplicate_merge_rejected(self):
        with pytest.raises(SubwordError, match="duplicate"):
            MergeTable((("a", "b"), ("a", "b")))

    def test_whitespace_symbol_rejected(self):
        with pytest.raises(SubwordError):
            MergeTable((("a b", "c"),))

    def test_separator_inside_symbol_rejected(self):
        with pytest.raises(SubwordError, match="separator"):
            MergeTable((("a@@", "b"),))

    def test_bad_separator_rejected(self):
        with pytest.raises(SubwordError):
            MergeTable((), separator="")

    def test_ranks_follow_priority(self):
        table = MergeTable((("a", "b"), ("ab", "c</w>")))
        assert table.ranks == {("a", "b"): 0, ("ab", "c</w>"): 1}


class TestApply:
    def test_no_merges_splits_to_characters(self):
        table = MergeTable(())
        assert apply_bpe(("xy",), table) == ("x@@", "y")

    def test_partial_merge(self):
        table = MergeTable((("a", "b"),))
        assert apply_bpe(("abc",), table) == ("ab@@", "c")

    def test_full_word_merge_removes_marker(self):
        table = learn_bpe(["ab"] * 3, 1)
        assert apply_bpe(("ab",), table) == ("ab",)

    def test_priority_order_wins(self):
        # the lower-rank merge applies first and can block a later one
        table = MergeTable((("b", "c"), ("a", "b")))
        assert apply_bpe(("abcd",), table) == ("a@@", "bc@@", "d")
        reversed_table = MergeTable((("a", "b"), ("b", "c")))
        assert apply_bpe(("abcd",), reversed_table) == ("ab@@", "c@@", "d")

    def test_reserved_tokens_pass_through(self):
        table = learn_bpe(["ab"] * 3, 1)
        assert apply_bpe(("UNK", "ab", "<mtl:orig>"), table) == (
            "UNK", "ab", "<mtl:orig>"
        )

    def test_learned_corpus_segments_consistently(self):
        corpus = ["low lower lowest", "low lower", "newest newest"]
        table = learn_bpe(corpus, 8)
        once = apply_bpe(("lower", "newest"), table)
        again = apply_bpe(("lower", "newest"), table)
        assert once == again
        assert undo_bpe(once) == ("lower", "newest")

    def test_single_character_word(self):
        table = MergeTable(())
        assert apply_bpe(("a",), table) == ("a",)


class TestUndo:
    def test_plain_tokens_unchanged(self):
        assert undo_bpe(("a", "b")) == ("a", "b")

    def test_joins_continuations(self):
        assert undo_bpe(("lo@@", "w@@", "er", "x")) == ("lower", "x")

    def test_dangling_continuation_rejected(self):
        with pytest.raises(SubwordError, match="continuation"):
            undo_bpe(("lo@@",))

    def test_custom_separator(self):
        assert undo_bpe(("a++", "b"), separator="++") == ("ab",)

    def test_bad_separator_rejected(self):
        with pytest.raises(ValueError):
            undo_bpe(("a",), separator="")


class TestRoundTrip:
    def test_seeded_random_sequences(self):
        rng = random.Random(20240817)
        alphabet = "abcdefghüß日"
        corpus = [
            " ".join(
                "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 8)))
                for _ in range(rng.randint(1, 12))
            )
            for _ in range(300)
        ]
        table = learn_bpe(corpus, 50)
        for line in corpus[:150]:
            tokens = tuple(line.split())
            assert undo_bpe(apply_bpe(tokens, table)) == tokens

    @settings(max_examples=100, deadline=None)
    @given(
        st.lists(
            st.text(
                alphabet=st.characters(
                    whitelist_categories=("Ll", "Lu", "Nd"), max_codepoint=0x2FF
                ),
                min_size=1, max_size=10,
            ).filter(lambda tok: "@@" not in tok and tok not in DEFAULT_RESERVED),
            min_size=1, max_size=8,
        ),
        st.integers(min_value=0, max_value=30),
    )
    def test_roundtrip_property(self, tokens, merges):
        table = learn_bpe([tokens, tokens], merges)
        assert undo_bpe(apply_bpe(tuple(tokens), table)) == tuple(tokens)


class TestSaveLoad:
    def test_roundtrip(self, tmp_path):
        table = learn_bpe(["low lower lowest"] * 2, 6)
        path = tmp_path / "merges.txt"
        save_merges(table, path)
        assert load_merges(path).merges == table.merges

    def test_file_format(self, tmp_path):
        table = MergeTable((("a", "b</w>"), ("c", "d")))
        path = tmp_path / "merges.txt"
        save_merges(table, path)
        assert path.read_text(encoding="utf-8") == "a b</w>\nc d\n"

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "merges.txt"
        path.write_text("a b\nbroken\n", encoding="utf-8")
        with pytest.raises(SubwordError, match="line 2"):
            load_merges(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(SubwordError, match="cannot read"):
            load_merges(tmp_path / "absent.txt")
