"""Shared fixtures built on the helpers in bridge_support.py."""

from __future__ import annotations

import json

import pytest

from bridge_support import run_mtlaug, write_copy_corpus


@pytest.fixture(scope="session")
def copy_stream(tmp_path_factory):
    """Stream over a 200-pair copy language with reverse and swap tasks."""
    root = tmp_path_factory.mktemp("copy-stream")
    src, tgt = root / "copy.src", root / "copy.tgt"
    write_copy_corpus(src, tgt)
    out = root / "stream.jsonl"
    result = run_mtlaug(
        "augment", "--src", str(src), "--tgt", str(tgt), "--min-tokens", "1",
        "--transform", "reverse,swap:0.5", "--seed", "5", "--epochs", "5",
        "--max-batch-tokens", "64", "--out", str(out),
    )
    assert result.returncode == 0, result.stderr
    assert json.loads(result.stdout)["pairs"] == 200
    return out
