"""Pharaoh parsing, intersection pruning and lexicon extraction."""

from __future__ import annotations

import pytest

from mtlaug import (
    AlignmentError,
    AlignmentSet,
    BilingualLexicon,
    ParallelPair,
    build_lexicon,
    intersect,
    parse_pharaoh,
    target_to_source,
)
from mtlaug.alignment import (
    load_lexicon,
    read_pharaoh_file,
    save_lexicon,
)


class TestParsePharaoh:
    def test_basic(self):
        parsed = parse_pharaoh("0-0 1-2 3-1", 4, 3)
        assert parsed.links == frozenset({(0, 0), (1, 2), (3, 1)})
        assert (parsed.src_len, parsed.tgt_len) == (4, 3)

    def test_empty_line_means_no_links(self):
        assert parse_pharaoh("", 5, 5).links == frozenset()

    def test_malformed_field(self):
        for bad in ("0:1", "a-1", "1-", "-2", "1-2-3"):
            with pytest.raises(AlignmentError, match="malformed"):
                parse_pharaoh(bad, 9, 9)

    def test_out_of_bounds(self):
        with pytest.raises(AlignmentError, match="out of bounds"):
            parse_pharaoh("3-0", 3, 3)
        with pytest.raises(AlignmentError, match="out of bounds"):
            parse_pharaoh("0-3", 3, 3)

    def test_swapped_flips_orientation(self):
        parsed = parse_pharaoh("0-2 1-0", 3, 4).swapped()
        assert parsed.links == frozenset({(2, 0), (0, 1)})
        assert (parsed.src_len, parsed.tgt_len) == (4, 3)


class TestReadPharaohFile:
    def test_matches_lines_by_pair_id(self, tmp_path):
        path = tmp_path / "align"
        path.write_text("0-0\n1-0 0-1\n\n", encoding="utf-8")
        pairs = [
            ParallelPair(0, ("a", "b"), ("x", "y")),
            ParallelPair(2, ("c", "d"), ("z", "w")),  # filtered corpus: id skips 1
        ]
        by_id = read_pharaoh_file(path, pairs)
        assert by_id[0].links == frozenset({(0, 0)})
        assert by_id[2].links == frozenset()

    def test_swapped_orientation(self, tmp_path):
        path = tmp_path / "align"
        path.write_text("1-0\n", encoding="utf-8")
        pairs = [ParallelPair(0, ("a",), ("x", "y"))]
        by_id = read_pharaoh_file(path, pairs, swapped=True)
        assert by_id[0].links == frozenset({(0, 1)})
        assert (by_id[0].src_len, by_id[0].tgt_len) == (1, 2)

    def test_short_file_rejected(self, tmp_path):
        path = tmp_path / "align"
        path.write_text("0-0\n", encoding="utf-8")
        pairs = [ParallelPair(1, ("a",), ("x",))]
        with pytest.raises(AlignmentError, match="no line for pair 1"):
            read_pharaoh_file(path, pairs)

    def test_error_names_line(self, tmp_path):
        path = tmp_path / "align"
        path.write_text("0-0\nbroken\n", encoding="utf-8")
        pairs = [ParallelPair(1, ("a",), ("x",))]
        with pytest.raises(AlignmentError, match="line 2"):
            read_pharaoh_file(path, pairs)


class TestIntersect:
    def set_of(self, links, src_len=5, tgt_len=5):
        return AlignmentSet(frozenset(links), src_len, tgt_len)

    def test_keeps_common_links_only(self):
        a = self.set_of({(0, 0), (1, 1), (2, 2)})
        b = self.set_of({(1, 1), (2, 2), (3, 3)})
        assert intersect(a, b).links == frozenset({(1, 1), (2, 2)})

    def test_prunes_one_to_many(self):
        common = {(0, 0), (0, 1), (2, 2)}
        merged = intersect(self.set_of(common), self.set_of(common))
        assert merged.links == frozenset({(2, 2)})

    def test_prunes_many_to_one(self):
        common = {(0, 0), (1, 0), (2, 2)}
        merged = intersect(self.set_of(common), self.set_of(common))
        assert merged.links == frozenset({(2, 2)})

    def test_result_is_one_to_one(self):
        a = self.set_of({(0, 1), (1, 0), (2, 2), (3, 2), (0, 3)})
        b = self.set_of({(0, 1), (1, 0), (2, 2), (3, 2), (0, 3)})
        merged = intersect(a, b)
        sources = [s for s, _ in merged.links]
        targets = [t for _, t in merged.links]
        assert len(set(sources)) == len(sources)
        assert len(set(targets)) == len(targets)

    def test_symmetric(self):
        a = self.set_of({(0, 0), (1, 2)})
        b = self.set_of({(0, 0), (2, 1)})
        assert intersect(a, b).links == intersect(b, a).links

    def test_idempotent_on_one_to_one(self):
        a = self.set_of({(0, 2), (1, 0), (3, 3)})
        assert intersect(a, a).links == a.links

    def test_length_mismatch_rejected(self):
        with pytest.raises(AlignmentError, match="lengths"):
            intersect(self.set_of({(0, 0)}, 5, 5), self.set_of({(0, 0)}, 4, 5))


class TestTargetToSource:
    def test_maps_aligned_targets(self):
        alignment = AlignmentSet(frozenset({(0, 1), (2, 0)}), 3, 3)
        assert target_to_source(alignment) == {1: 0, 0: 2}

    def test_double_link_rejected(self):
        alignment = AlignmentSet(frozenset({(0, 1), (2, 1)}), 3, 3)
        with pytest.raises(AlignmentError, match="more than once"):
            target_to_source(alignment)


class TestLexicon:
    def test_argmax_per_source_word(self):
        pairs = [
            ParallelPair(0, ("Haus", "Hund"), ("house", "dog")),
            ParallelPair(1, ("Haus", "Katze"), ("house", "cat")),
            ParallelPair(2, ("Haus",), ("home",)),
        ]
        alignments = {
            0: AlignmentSet(frozenset({(0, 0), (1, 1)}), 2, 2),
            1: AlignmentSet(frozenset({(0, 0), (1, 1)}), 2, 2),
            2: AlignmentSet(frozenset({(0, 0)}), 1, 1),
        }
        lexicon = build_lexicon(pairs, alignments)
        assert lexicon.lookup("Haus") == ("house", 2)
        assert lexicon.lookup("Hund") == ("dog", 1)
        assert lexicon.lookup("fehlt") is None

    def test_count_tie_breaks_to_smallest_target(self):
        pairs = [
            ParallelPair(0, ("Bank",), ("bench",)),
            ParallelPair(1, ("Bank",), ("bank",)),
        ]
        alignments = {
            0: AlignmentSet(frozenset({(0, 0)}), 1, 1),
            1: AlignmentSet(frozenset({(0, 0)}), 1, 1),
        }
        assert build_lexicon(pairs, alignments).lookup("Bank") == ("bank", 1)

    def test_entry_list_sorted_by_source(self):
        pairs = [ParallelPair(0, ("b", "a", "c"), ("y", "x", "z"))]
        alignments = {0: AlignmentSet(frozenset({(0, 0), (1, 1), (2, 2)}), 3, 3)}
        lexicon = build_lexicon(pairs, alignments)
        assert [entry[0] for entry in lexicon.entry_list] == ["a", "b", "c"]

    def test_missing_alignment_rejected(self):
        pairs = [ParallelPair(3, ("a",), ("x",))]
        with pytest.raises(AlignmentError, match="pair 3"):
            build_lexicon(pairs, {})

    def test_extra_alignments_ignored(self):
        pairs = [ParallelPair(0, ("a",), ("x",))]
        alignments = {
            0: AlignmentSet(frozenset({(0, 0)}), 1, 1),
            9: AlignmentSet(frozenset({(0, 0)}), 1, 1),
        }
        assert len(build_lexicon(pairs, alignments)) == 1

    def test_length_mismatch_rejected(self):
        pairs = [ParallelPair(0, ("a", "b"), ("x",))]
        alignments = {0: AlignmentSet(frozenset({(0, 0)}), 1, 1)}
        with pytest.raises(AlignmentError, match="lengths"):
            build_lexicon(pairs, alignments)

    def test_unsorted_entry_list_rejected(self):
        with pytest.raises(ValueError, match="sorted"):
            BilingualLexicon((("b", "y", 1), ("a", "x", 1)))

    def test_duplicate_source_rejected(self):
        with pytest.raises(ValueError, match="duplicate"):
            BilingualLexicon((("a", "x", 1), ("a", "y", 1)))

    def test_lookup_on_larger_list(self):
        entries = tuple((f"s{i:03d}", f"t{i}", i + 1) for i in range(50))
        lexicon = BilingualLexicon(entries)
        for i in (0, 17, 49):
            assert lexicon.lookup(f"s{i:03d}") == (f"t{i}", i + 1)
        assert lexicon.lookup("zzz") is None
        assert lexicon.lookup("") is None


class TestLexiconFiles:
    def test_roundtrip(self, tmp_path):
        lexicon = BilingualLexicon((("a", "x", 2), ("b", "y", 1)))
        path = tmp_path / "lex.tsv"
        save_lexicon(lexicon, path)
        assert path.read_text(encoding="utf-8") == "a\tx\t2\nb\ty\t1\n"
        assert load_lexicon(path).entry_list == lexicon.entry_list

    def test_malformed_line_reports_number(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("a\tx\t1\nbroken line\n", encoding="utf-8")
        with pytest.raises(AlignmentError, match="line 2"):
            load_lexicon(path)

    def test_bad_count_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("a\tx\t0\n", encoding="utf-8")
        with pytest.raises(AlignmentError, match="count"):
            load_lexicon(path)

    def test_unsorted_file_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("b\ty\t1\na\tx\t1\n", encoding="utf-8")
        with pytest.raises(AlignmentError, match="sorted"):
            load_lexicon(path)
