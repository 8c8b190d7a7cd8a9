"""Command line: train on a stream, then emit analysis dump files.

Exit codes match the stream producer's convention: 0 success, 1 usage
error, 2 data error.  Each command prints a one-line JSON summary.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .embed import HashingEmbedder, dump_similarities
from .errors import BridgeError
from .model import load_model, save_model
from .perturb import dump_perturbations
from .trainer import BridgeConfig, train_on_stream


class UsageError(Exception):
    """Bad flags or flag combinations; exits with code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _read_sentences(path: str) -> list[tuple[str, ...]]:
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise BridgeError(f"cannot read {path}: {exc}") from exc
    sentences = []
    for lineno, line in enumerate(lines, start=1):
        tokens = tuple(line.split())
        if not tokens:
            raise BridgeError(f"{path}: empty line {lineno}")
        sentences.append(tokens)
    return sentences


def _read_pairs(src_path: str, tgt_path: str) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    src = _read_sentences(src_path)
    tgt = _read_sentences(tgt_path)
    if len(src) != len(tgt):
        raise BridgeError(
            f"line count mismatch: {src_path} has {len(src)}, "
            f"{tgt_path} has {len(tgt)}"
        )
    return list(zip(src, tgt))


def _cmd_train(args) -> dict:
    config = BridgeConfig(
        stream=args.stream, emb=args.emb, hidden=args.hidden,
        seed=args.seed, learning_rate=args.learning_rate,
    )
    if args.steps < 1:
        raise UsageError(f"--steps must be >= 1, got {args.steps}")
    model, vocab, history = train_on_stream(config, args.steps)
    save_model(model, vocab, args.out)
    summary = {
        "command": "train", "steps": len(history), "vocab": len(vocab),
        "first_loss": history[0], "last_loss": history[-1], "out": str(args.out),
    }
    if args.loss_log is not None:
        Path(args.loss_log).write_text(
            json.dumps(history) + "\n", encoding="utf-8"
        )
        summary["loss_log"] = str(args.loss_log)
    return summary


def _cmd_dump_perturbations(args) -> dict:
    if args.draws < 1:
        raise UsageError(f"--draws must be >= 1, got {args.draws}")
    if args.lam < 0:
        raise UsageError(f"--lam must be non-negative, got {args.lam}")
    model, vocab = load_model(args.model)
    pairs = _read_pairs(args.src, args.tgt)
    count = dump_perturbations(
        model, vocab, pairs, args.draws, args.lam, args.seed, args.out
    )
    return {
        "command": "dump-perturbations", "sentences": count,
        "draws": args.draws, "lam": args.lam, "out": str(args.out),
    }


def _cmd_dump_similarities(args) -> dict:
    hypotheses = _read_sentences(args.hyp)
    references = _read_sentences(args.ref)
    embedder = HashingEmbedder(args.dim)
    try:
        count = dump_similarities(hypotheses, references, embedder, args.out)
    except OSError as exc:
        raise BridgeError(f"cannot write {args.out}: {exc}") from exc
    return {
        "command": "dump-similarities", "sentences": count,
        "dim": args.dim, "out": str(args.out),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtl-bridge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train the toy model on a stream")
    p.add_argument("--stream", required=True, help="augmentation stream JSONL")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--emb", type=int, default=32)
    p.add_argument("--hidden", type=int, default=48)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--loss-log", help="optional JSON file of per-step losses")
    p.add_argument("--out", required=True, help="model checkpoint path")
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser(
        "dump-perturbations",
        help="teacher-forced probabilities under embedding noise",
    )
    p.add_argument("--model", required=True)
    p.add_argument("--src", required=True, help="test source token file")
    p.add_argument("--tgt", required=True, help="test reference token file")
    p.add_argument("--draws", type=int, default=50)
    p.add_argument("--lam", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_dump_perturbations)

    p = sub.add_parser(
        "dump-similarities",
        help="hypothesis/reference sentence embedding records",
    )
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_dump_similarities)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return 0 if exc.code in (None, 0) else int(exc.code)
    try:
        summary = args.handler(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BridgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, separators=(",", ":")))
    return 0


if __name__ == "__main__":
    sys.exit(main())
