"""Shared fixtures built on the helpers in support.py."""

from __future__ import annotations

import pytest

from mtlaug import AlignmentSet, BilingualLexicon, ParallelPair

from support import REFERENCE_LINKS, REFERENCE_SRC, REFERENCE_TGT, ScriptedStream


@pytest.fixture
def scripted():
    return ScriptedStream


@pytest.fixture
def reference_pair() -> ParallelPair:
    return ParallelPair(0, REFERENCE_SRC, REFERENCE_TGT)


@pytest.fixture
def reference_alignment() -> AlignmentSet:
    return AlignmentSet(REFERENCE_LINKS, len(REFERENCE_SRC), len(REFERENCE_TGT))


@pytest.fixture
def reference_lexicon() -> BilingualLexicon:
    return BilingualLexicon((
        ("Schach", "chess", 3),
        ("Spezialwissen", "specialties", 2),
        ("aufzurüsten", "arming", 4),
        ("kalt", "cold", 5),
    ))
