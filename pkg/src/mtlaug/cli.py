"""Command-line interface.

Every subcommand reads only its declared flags, writes output files
atomically (temp file + rename) and prints a one-line JSON summary to
stdout.  Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__
from .alignment import build_lexicon, intersect, load_lexicon, read_pharaoh_file
from .corpus import (
    BACK_TRANSLATED,
    DEFAULT_MAX_TOKENS,
    DEFAULT_MIN_TOKENS,
    filter_pairs,
    read_parallel,
)
from .errors import DataError
from .stream import (
    BT_MODES,
    DEFAULT_MAX_BATCH_TOKENS,
    PHASES,
    StreamConfig,
    StreamResources,
    as_entries,
    combine_bt,
    write_stream,
)
from .subword import apply_bpe, learn_bpe, load_merges
from .tokens import ALPHA_TRANSFORMS, TRANSFORM_NAMES
from . import analysis

ALPHA_RANGE = (Fraction(1, 10), Fraction(9, 10))


class UsageError(Exception):
    """Bad flags or flag combinations; exits with code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit(2); we use 2 for data
        raise UsageError(message)


@contextmanager
def _atomic_output(path: str | Path):
    """Write to a temp file and rename into place on success."""
    target = Path(path)
    temp = target.with_name(target.name + f".tmp.{os.getpid()}")
    handle = open(temp, "w", encoding="utf-8")
    try:
        yield handle
        handle.close()
        os.replace(temp, target)
    except BaseException:
        handle.close()
        temp.unlink(missing_ok=True)
        raise


def _parse_transforms(values: list[str]) -> tuple:
    specs = []
    for value in values:
        for part in value.split(","):
            part = part.strip()
            if not part:
                continue
            name, sep, alpha_text = part.partition(":")
            if name not in TRANSFORM_NAMES:
                raise UsageError(
                    f"unknown transform {name!r}, expected one of "
                    f"{', '.join(TRANSFORM_NAMES)}"
                )
            if sep:
                if name not in ALPHA_TRANSFORMS:
                    raise UsageError(f"transform {name!r} takes no alpha")
                try:
                    alpha = Fraction(alpha_text)
                except (ValueError, ZeroDivisionError) as exc:
                    raise UsageError(f"bad alpha in {part!r}: {exc}") from exc
                if not ALPHA_RANGE[0] <= alpha <= ALPHA_RANGE[1]:
                    raise UsageError(
                        f"alpha {alpha_text} outside the supported range "
                        f"[{float(ALPHA_RANGE[0])}, {float(ALPHA_RANGE[1])}]"
                    )
            else:
                alpha = None
            specs.append((name, alpha))
    if not specs:
        raise UsageError("no transforms given")
    return tuple(specs)


def _add_corpus_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--src", required=True, help="source-side token file")
    parser.add_argument("--tgt", required=True, help="target-side token file")


def _add_filter_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--min-tokens", type=int, default=DEFAULT_MIN_TOKENS)
    parser.add_argument("--max-tokens", type=int, default=DEFAULT_MAX_TOKENS)


def _cmd_prepare(args) -> dict:
    pairs = read_parallel(args.src, args.tgt)
    kept = filter_pairs(pairs, args.min_tokens, args.max_tokens)
    with _atomic_output(args.out_src) as src_handle:
        for pair in kept:
            src_handle.write(" ".join(pair.src) + "\n")
    with _atomic_output(args.out_tgt) as tgt_handle:
        for pair in kept:
            tgt_handle.write(" ".join(pair.tgt) + "\n")
    return {
        "command": "prepare", "read": len(pairs), "kept": len(kept),
        "dropped": len(pairs) - len(kept),
        "out_src": str(args.out_src), "out_tgt": str(args.out_tgt),
    }


def _cmd_learn_bpe(args) -> dict:
    def lines():
        for path in (args.src, args.tgt):
            with open(path, encoding="utf-8") as handle:
                yield from handle

    try:
        table = learn_bpe(lines(), args.num_merges)
    except OSError as exc:
        raise DataError(f"cannot read corpus: {exc}") from exc
    with _atomic_output(args.out) as handle:
        for left, right in table.merges:
            handle.write(f"{left} {right}\n")
    return {"command": "learn-bpe", "merges": len(table), "out": str(args.out)}


def _cmd_apply_bpe(args) -> dict:
    table = load_merges(args.merges)
    try:
        with open(args.src, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise DataError(f"cannot read {args.src}: {exc}") from exc
    encoded = 0
    with _atomic_output(args.out) as handle:
        for line in lines:
            handle.write(" ".join(apply_bpe(line.split(), table)) + "\n")
            encoded += 1
    return {"command": "apply-bpe", "lines": encoded, "out": str(args.out)}


def _cmd_align_intersect(args) -> dict:
    pairs = read_parallel(args.src, args.tgt)
    forward = read_pharaoh_file(args.align_st, pairs)
    backward = read_pharaoh_file(args.align_ts, pairs, swapped=True)
    links = 0
    with _atomic_output(args.out) as handle:
        for pair in pairs:
            merged = intersect(forward[pair.pair_id], backward[pair.pair_id])
            fields = [f"{s}-{t}" for s, t in sorted(merged.links)]
            links += len(merged.links)
            handle.write(" ".join(fields) + "\n")
    return {
        "command": "align-intersect", "pairs": len(pairs),
        "links": links, "out": str(args.out),
    }


def _cmd_lexicon(args) -> dict:
    pairs = read_parallel(args.src, args.tgt)
    kept = filter_pairs(pairs, args.min_tokens, args.max_tokens)
    forward = read_pharaoh_file(args.align_st, kept)
    backward = read_pharaoh_file(args.align_ts, kept, swapped=True)
    one_to_one = {
        pair.pair_id: intersect(forward[pair.pair_id], backward[pair.pair_id])
        for pair in kept
    }
    lexicon = build_lexicon(kept, one_to_one)
    with _atomic_output(args.out) as handle:
        for source, target, count in lexicon.entry_list:
            handle.write(f"{source}\t{target}\t{count}\n")
    return {
        "command": "lexicon", "pairs": len(kept),
        "entries": len(lexicon), "out": str(args.out),
    }


def _cmd_augment(args) -> dict:
    transforms = _parse_transforms(args.transform)
    config = StreamConfig(
        transforms=transforms,
        seed=args.seed,
        max_batch_tokens=args.max_batch_tokens,
        bt_mode=args.bt_mode,
        phase=args.phase,
    )
    raw_pairs = read_parallel(args.src, args.tgt)
    names = {name for name, _ in transforms}
    needs_st = "mono" in names and config.phase == "augment"
    needs_one_to_one = "replace" in names and config.phase == "augment"

    alignments = None
    one_to_one = None
    lexicon = None
    if needs_st or needs_one_to_one:
        if args.align_st is None:
            raise UsageError("--align-st is required for mono/replace transforms")
        alignments = read_pharaoh_file(args.align_st, raw_pairs)
    if needs_one_to_one:
        if args.align_ts is None:
            raise UsageError("--align-ts is required for the replace transform")
        backward = read_pharaoh_file(args.align_ts, raw_pairs, swapped=True)
        one_to_one = {
            pair.pair_id: intersect(alignments[pair.pair_id], backward[pair.pair_id])
            for pair in raw_pairs
        }

    pairs = filter_pairs(raw_pairs, args.min_tokens, args.max_tokens)
    if not pairs:
        raise DataError("no pairs left after length filtering")

    if needs_one_to_one:
        if args.lexicon is not None:
            lexicon = load_lexicon(args.lexicon)
        else:
            lexicon = build_lexicon(
                pairs, {pair.pair_id: one_to_one[pair.pair_id] for pair in pairs}
            )
        if len(lexicon) == 0:
            raise DataError("bilingual lexicon is empty")

    if (args.bt_src is None) != (args.bt_tgt is None):
        raise UsageError("--bt-src and --bt-tgt must be given together")
    if args.bt_src is not None:
        bt_pairs = filter_pairs(
            read_parallel(args.bt_src, args.bt_tgt, origin=BACK_TRANSLATED),
            args.min_tokens, args.max_tokens,
        )
        entries = combine_bt(pairs, bt_pairs, config.bt_mode)
    else:
        entries = as_entries(pairs)

    merges = load_merges(args.merges) if args.merges is not None else None
    resources = StreamResources(
        alignments=alignments, one_to_one=one_to_one,
        lexicon=lexicon, merges=merges,
    )
    if args.epochs < 1:
        raise UsageError(f"--epochs must be >= 1, got {args.epochs}")
    if args.workers < 1:
        raise UsageError(f"--workers must be >= 1, got {args.workers}")
    with _atomic_output(args.out) as handle:
        totals = write_stream(
            handle, entries, config, args.epochs, resources, workers=args.workers
        )
    summary = {"command": "augment", "pairs": len(entries), "out": str(args.out)}
    summary.update(totals)
    return summary


def _cmd_combine_bt(args) -> dict:
    pairs = read_parallel(args.src, args.tgt)
    bt_pairs = read_parallel(args.bt_src, args.bt_tgt, origin=BACK_TRANSLATED)
    entries = combine_bt(pairs, bt_pairs, args.bt_mode)
    with _atomic_output(args.out_src) as handle:
        for entry in entries:
            handle.write(" ".join(entry.pair.src) + "\n")
    with _atomic_output(args.out_tgt) as handle:
        for entry in entries:
            handle.write(" ".join(entry.pair.tgt) + "\n")
    if args.out_origins is not None:
        with _atomic_output(args.out_origins) as handle:
            for entry in entries:
                origin = "bt" if entry.pair.origin == BACK_TRANSLATED else "parallel"
                handle.write(origin + "\n")
    return {
        "command": "combine-bt", "parallel": len(pairs), "bt": len(bt_pairs),
        "out_src": str(args.out_src), "out_tgt": str(args.out_tgt),
    }


def _cmd_analyze_source(args) -> dict:
    dumps = analysis.load_dumps(args.dumps)
    mean_pct, std_pct, tokens = analysis.corpus_source_share(dumps)
    curve = analysis.position_curve(dumps, args.degree)
    with _atomic_output(args.out) as handle:
        handle.write(curve.to_json() + "\n")
    return {
        "command": "analyze-source", "sentences": len(dumps), "tokens": tokens,
        "mean_pct": mean_pct, "std_pct": std_pct, "degree": curve.degree,
        "out": str(args.out),
    }


def _cmd_analyze_kde(args) -> dict:
    records = analysis.load_similarities(args.embeddings)
    values = analysis.similarity_values(records)
    if not args.bandwidth > 0:
        raise UsageError(f"--bandwidth must be positive, got {args.bandwidth}")
    if args.grid_points < 2:
        raise UsageError(f"--grid-points must be >= 2, got {args.grid_points}")
    grid, densities = analysis.kde(
        values, args.bandwidth,
        analysis.default_grid(values, args.bandwidth, args.grid_points),
    )
    with _atomic_output(args.out) as handle:
        for x, d in zip(grid, densities):
            handle.write(f"{float(x)!r}\t{float(d)!r}\n")
    return {
        "command": "analyze-kde", "samples": int(values.size),
        "bandwidth": args.bandwidth, "grid_points": int(grid.size),
        "out": str(args.out),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtlaug", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="length-filter a parallel corpus")
    _add_corpus_flags(p)
    _add_filter_flags(p)
    p.add_argument("--out-src", required=True)
    p.add_argument("--out-tgt", required=True)
    p.set_defaults(handler=_cmd_prepare)

    p = sub.add_parser("learn-bpe", help="learn joint subword merges")
    _add_corpus_flags(p)
    p.add_argument("-n", "--num-merges", type=int, default=10000)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_learn_bpe)

    p = sub.add_parser("apply-bpe", help="segment one token file")
    p.add_argument("--src", required=True, help="token file to segment")
    p.add_argument("--merges", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_apply_bpe)

    p = sub.add_parser(
        "align-intersect",
        help="intersect directional alignments into one-to-one links",
    )
    _add_corpus_flags(p)
    p.add_argument("--align-st", required=True, help="source-to-target pharaoh file")
    p.add_argument("--align-ts", required=True, help="target-to-source pharaoh file")
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_align_intersect)

    p = sub.add_parser("lexicon", help="extract a bilingual lexicon")
    _add_corpus_flags(p)
    _add_filter_flags(p)
    p.add_argument("--align-st", required=True)
    p.add_argument("--align-ts", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_lexicon)

    p = sub.add_parser("augment", help="write a multi-task training stream")
    _add_corpus_flags(p)
    _add_filter_flags(p)
    p.add_argument(
        "--transform", action="append", default=[], metavar="NAME[:ALPHA]",
        help="transform to apply; repeatable, comma-separable",
    )
    p.add_argument("--align-st", help="pharaoh file, required for mono/replace")
    p.add_argument("--align-ts", help="pharaoh file, required for replace")
    p.add_argument("--lexicon", help="lexicon TSV (default: built from alignments)")
    p.add_argument("--merges", help="merge table; when given, output is segmented")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=1)
    p.add_argument("--max-batch-tokens", type=int, default=DEFAULT_MAX_BATCH_TOKENS)
    p.add_argument("--bt-src")
    p.add_argument("--bt-tgt")
    p.add_argument("--bt-mode", choices=BT_MODES, default="plain")
    p.add_argument("--phase", choices=PHASES, default="augment")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_augment)

    p = sub.add_parser("combine-bt", help="merge parallel and back-translated text")
    _add_corpus_flags(p)
    p.add_argument("--bt-src", required=True)
    p.add_argument("--bt-tgt", required=True)
    p.add_argument("--bt-mode", choices=BT_MODES, default="plain")
    p.add_argument("--out-src", required=True)
    p.add_argument("--out-tgt", required=True)
    p.add_argument("--out-origins")
    p.set_defaults(handler=_cmd_combine_bt)

    p = sub.add_parser(
        "analyze-source",
        help="summarize source contribution from perturbation dumps",
    )
    p.add_argument("--dumps", required=True, help="perturbation dump JSONL")
    p.add_argument("--degree", type=int, default=analysis.DEFAULT_DEGREE)
    p.add_argument("--out", required=True, help="trend curve JSON")
    p.set_defaults(handler=_cmd_analyze_source)

    p = sub.add_parser(
        "analyze-kde",
        help="density estimate of hypothesis/reference similarities",
    )
    p.add_argument("--embeddings", required=True, help="similarity record JSONL")
    p.add_argument("--bandwidth", type=float, default=analysis.DEFAULT_BANDWIDTH)
    p.add_argument("--grid-points", type=int, default=analysis.DEFAULT_GRID_POINTS)
    p.add_argument("--out", required=True, help="density TSV")
    p.set_defaults(handler=_cmd_analyze_kde)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return 0 if exc.code in (None, 0) else int(exc.code)
    try:
        summary = args.handler(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, separators=(",", ":")))
    return 0


if __name__ == "__main__":
    sys.exit(main())
