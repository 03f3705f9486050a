"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 I/O problem, 3 tokenizer training
failure, 4 insufficient data, 5 missing/duplicate task, 6 invalid input.
Every command writes a ``<out>.manifest.json`` next to its outputs; rerunning
with identical inputs reproduces outputs and manifests byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import struct
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from driftmix import __version__, divergence
from driftmix.benchmark import (
    canonical_tasks,
    compute_metric,
    load_registry,
    summarize,
    task_score,
)
from driftmix.corpus import Document, FilterConfig, ingest, segment_by_month
from driftmix.manifest import build_manifest
from driftmix.mixture import batch_counts, make_schedule, pack, span_corrupt
from driftmix.svg import line_chart_svg
from driftmix.tokenizer import (
    TrainParams,
    Vocabulary,
    byte_fallback_surgery,
    token_frequencies,
    train_unigram,
)

EXIT_INTERNAL = 1
EXIT_IO = 2
EXIT_TRAINING = 3
EXIT_INSUFFICIENT = 4
EXIT_MISSING_TASK = 5
EXIT_INVALID = 6


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _atomic_write(path: Path, data: str | bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp.{os.getpid()}")
    if isinstance(data, str):
        tmp.write_text(data, encoding="utf-8")
    else:
        tmp.write_bytes(data)
    os.replace(tmp, path)


def _write_json(path: Path, obj):
    _atomic_write(path, json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _write_manifest(out: Path, command: str, params: dict, inputs: list[Path], seed: int):
    mani = build_manifest(command, params, inputs, seed)
    _write_json(out.with_name(out.name + ".manifest.json"), mani.to_json_dict())


def _require_file(path: Path) -> Path:
    if not path.is_file():
        raise CliError(EXIT_IO, f"cannot read input file: {path}")
    return path


def _read_documents(path: Path, cfg: FilterConfig, strict: bool) -> list[Document]:
    _require_file(path)
    with open(path, encoding="utf-8") as f:
        docs_iter, _stats = ingest(f, cfg, strict=strict)
        try:
            return list(docs_iter)
        except ValueError as exc:
            raise CliError(EXIT_INVALID, f"{path}: {exc}") from exc


def _train(docs: list[Document], vocab_size: int, params: TrainParams) -> Vocabulary:
    try:
        return train_unigram(docs, vocab_size, params)
    except Exception as exc:
        raise CliError(EXIT_TRAINING, f"tokenizer training failed: {exc}") from exc


def _out_path(args, name: str) -> Path:
    p = Path(name)
    if not p.is_absolute():
        p = Path(args.out_dir) / p
    return p


def _filter_config(args) -> FilterConfig:
    return FilterConfig(
        drop_media=args.drop_media,
        drop_urls=args.drop_urls,
        min_chars=args.min_chars,
    )


def _train_params(args) -> TrainParams:
    return TrainParams(
        character_coverage=args.coverage,
        max_sentences=args.max_sentences,
        seed=args.seed,
    )


# ------------------------------------------------------------------ commands


def cmd_compare(args) -> int:
    path_a = _require_file(Path(args.corpus_a))
    path_b = _require_file(Path(args.corpus_b))
    cfg = _filter_config(args)
    docs_a = _read_documents(path_a, cfg, args.strict)
    docs_b = _read_documents(path_b, cfg, args.strict)
    if not docs_a or not docs_b:
        raise CliError(EXIT_INSUFFICIENT, "empty corpus after filtering")
    params = _train_params(args)
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as ex:
        fut_a = ex.submit(_train, docs_a, args.vocab_size, params)
        fut_b = ex.submit(_train, docs_b, args.vocab_size, params)
        vocab_a, vocab_b = fut_a.result(), fut_b.result()
    fa = token_frequencies(vocab_a, docs_a)
    fb = token_frequencies(vocab_b, docs_b)
    report = divergence.compare_tables(fa, fb, args.floor)
    out = _out_path(args, args.out)
    _write_json(out, report.to_json_dict())
    _write_manifest(
        out,
        "compare",
        {"vocab_size": args.vocab_size, "floor": args.floor, "filters": cfg.__dict__},
        [path_a, path_b],
        args.seed,
    )
    return 0


def cmd_drift(args) -> int:
    path = _require_file(Path(args.corpus))
    cfg = _filter_config(args)
    docs = _read_documents(path, cfg, args.strict)
    segments = segment_by_month(docs)
    if len(segments) < 2:
        raise CliError(
            EXIT_INSUFFICIENT,
            f"drift needs at least 2 months of data, found {len(segments)}",
        )
    params = _train_params(args)
    labels = list(segments)

    def month_table(label):
        seg_docs = list(segments[label].documents)
        vocab = _train(seg_docs, args.vocab_size, params)
        return label, token_frequencies(vocab, seg_docs)

    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as ex:
        tables = list(ex.map(month_table, labels))
    series = divergence.drift(tables, args.floor)

    out = _out_path(args, args.out)
    _atomic_write(out, series.to_csv())
    svg_out = out.with_suffix(".svg")
    pair_labels = [f"{a}→{b}" for a, b, _ in series.pairs]
    chart = line_chart_svg(
        pair_labels,
        {
            "skl": [rep.skl for _, _, rep in series.pairs],
            "jaccard": [rep.jaccard for _, _, rep in series.pairs],
        },
        title=f"month-to-month drift: {path.name}",
    )
    _atomic_write(svg_out, chart)
    _write_manifest(
        out,
        "drift",
        {"vocab_size": args.vocab_size, "floor": args.floor, "filters": cfg.__dict__},
        [path],
        args.seed,
    )
    return 0


def cmd_train_tokenizer(args) -> int:
    path = _require_file(Path(args.corpus))
    docs = _read_documents(path, _filter_config(args), args.strict)
    vocab = _train(docs, args.vocab_size, _train_params(args))
    out = _out_path(args, args.out)
    _atomic_write(out, vocab.dumps())
    _write_manifest(
        out,
        "train-tokenizer",
        {"vocab_size": args.vocab_size, "coverage": args.coverage},
        [path],
        args.seed,
    )
    return 0


def cmd_surgery(args) -> int:
    path = _require_file(Path(args.vocab))
    try:
        vocab = Vocabulary.load(path)
        patched = byte_fallback_surgery(vocab)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    out = _out_path(args, args.out)
    _atomic_write(out, patched.dumps())
    _write_manifest(out, "surgery", {}, [path], args.seed)
    return 0


def cmd_freqdist(args) -> int:
    vocab_path = _require_file(Path(args.vocab))
    corpus_path = _require_file(Path(args.corpus))
    try:
        vocab = Vocabulary.load(vocab_path)
    except ValueError as exc:
        raise CliError(EXIT_INVALID, f"{vocab_path}: {exc}") from exc
    docs = _read_documents(corpus_path, _filter_config(args), args.strict)
    table = token_frequencies(vocab, docs)
    out = _out_path(args, args.out)
    _write_json(out, table.to_json_dict())
    _write_manifest(out, "freqdist", {}, [vocab_path, corpus_path], args.seed)
    return 0


def cmd_mix_plan(args) -> int:
    try:
        sched = make_schedule(args.kind, args.ratio_sm, args.steps)
        rows = ["step,n_c4,n_sm"]
        for step in range(1, args.steps + 1):
            n_c4, n_sm = batch_counts(sched, step, args.batch_size)
            rows.append(f"{step},{n_c4},{n_sm}")
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    out = _out_path(args, args.out)
    _atomic_write(out, "\n".join(rows) + "\n")
    _write_manifest(
        out,
        "mix-plan",
        {"kind": args.kind, "ratio_sm": args.ratio_sm, "steps": args.steps,
         "batch_size": args.batch_size},
        [],
        args.seed,
    )
    return 0


def _read_token_lines(path: Path) -> list[list[int]]:
    _require_file(path)
    examples = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                tokens = json.loads(line)
                if not isinstance(tokens, list) or not all(isinstance(t, int) for t in tokens):
                    raise ValueError("expected a JSON array of integers")
            except ValueError as exc:
                raise CliError(EXIT_INVALID, f"{path} line {lineno}: {exc}") from exc
            examples.append(tokens)
    return examples


def cmd_pack(args) -> int:
    path = Path(args.tokens)
    examples = _read_token_lines(path)
    try:
        packed = list(pack(examples, args.max_len))
    except ValueError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from exc
    blob = bytearray()
    for seq in packed:
        blob += struct.pack("<I", len(seq.token_ids))
        blob += np.asarray(seq.token_ids, dtype="<i4").tobytes()
    out = _out_path(args, args.out)
    _atomic_write(out, bytes(blob))
    _write_json(
        out.with_name(out.name + ".json"),
        {"max_len": args.max_len, "pad_id": 0},
    )
    _write_manifest(out, "pack", {"max_len": args.max_len}, [path], args.seed)
    return 0


def cmd_corrupt(args) -> int:
    path = Path(args.tokens)
    examples = _read_token_lines(path)
    lines = []
    for i, tokens in enumerate(examples):
        try:
            ex = span_corrupt(
                tokens,
                noise_density=args.noise_density,
                mean_span=args.mean_span,
                seed=args.seed + i,
            )
        except ValueError as exc:
            raise CliError(EXIT_INVALID, f"{path} example {i + 1}: {exc}") from exc
        lines.append(json.dumps({"inputs": list(ex.inputs), "targets": list(ex.targets)}))
    out = _out_path(args, args.out)
    _atomic_write(out, "\n".join(lines) + "\n")
    _write_manifest(
        out,
        "corrupt",
        {"noise_density": args.noise_density, "mean_span": args.mean_span},
        [path],
        args.seed,
    )
    return 0


def cmd_score(args) -> int:
    task_dir = Path(args.task_dir)
    if not task_dir.is_dir():
        raise CliError(EXIT_IO, f"not a directory: {task_dir}")
    if args.registry:
        reg_path = _require_file(Path(args.registry))
        try:
            registry = load_registry(reg_path.read_text(encoding="utf-8"))
        except (ValueError, KeyError) as exc:
            raise CliError(EXIT_INVALID, f"{reg_path}: {exc}") from exc
        inputs = [reg_path]
    else:
        registry = list(canonical_tasks())
        inputs = []

    names = [spec.name for spec in registry]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise CliError(EXIT_MISSING_TASK, f"duplicate tasks in registry: {dupes}")

    results = []
    pred_paths = []
    for spec in registry:
        pred_path = task_dir / f"{spec.name}.jsonl"
        if not pred_path.is_file():
            raise CliError(EXIT_MISSING_TASK, f"missing predictions for task {spec.name}: {pred_path}")
        pred_paths.append(pred_path)
        golds, preds = [], []
        with open(pred_path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    golds.append(obj["gold"])
                    preds.append(obj["pred"])
                except (ValueError, KeyError, TypeError) as exc:
                    raise CliError(
                        EXIT_INVALID, f"{pred_path} line {lineno}: {exc}"
                    ) from exc
        try:
            raw = compute_metric(spec, golds, preds)
            results.append(task_score(spec, raw))
        except ValueError as exc:
            raise CliError(EXIT_INVALID, f"task {spec.name}: {exc}") from exc
    try:
        summary = summarize(results)
    except ValueError as exc:
        raise CliError(EXIT_MISSING_TASK, str(exc)) from exc
    out = _out_path(args, args.out)
    _write_json(out, summary.to_json_dict())
    _write_manifest(out, "score", {"tasks": names}, inputs + pred_paths, args.seed)
    return 0


# ------------------------------------------------------------------ parser


def _add_corpus_filter_flags(p: argparse.ArgumentParser):
    p.add_argument("--drop-media", action=argparse.BooleanOptionalAction, default=True,
                   help="drop documents flagged has_media")
    p.add_argument("--drop-urls", action=argparse.BooleanOptionalAction, default=True,
                   help="drop documents with url_count > 0")
    p.add_argument("--min-chars", type=int, default=1, help="minimum text length")


def _add_train_flags(p: argparse.ArgumentParser):
    p.add_argument("--vocab-size", type=int, required=True, help="target vocabulary size")
    p.add_argument("--coverage", type=float, default=0.9995, help="character coverage")
    p.add_argument("--max-sentences", type=int, default=None,
                   help="cap on training sentences (seeded subsample)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftmix", description=__doc__)
    parser.add_argument("--version", action="version", version=f"driftmix {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--threads", type=int, default=1, help="worker threads")
    parser.add_argument("--out-dir", default=".", help="base directory for relative outputs")
    parser.add_argument("--strict", action="store_true",
                        help="abort on malformed corpus lines instead of skipping")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compare", help="divergence between two corpora")
    p.add_argument("corpus_a")
    p.add_argument("corpus_b")
    _add_train_flags(p)
    _add_corpus_filter_flags(p)
    p.add_argument("--floor", type=float, default=divergence.DEFAULT_FLOOR)
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("drift", help="month-to-month drift within one corpus")
    p.add_argument("corpus")
    _add_train_flags(p)
    _add_corpus_filter_flags(p)
    p.add_argument("--floor", type=float, default=divergence.DEFAULT_FLOOR)
    p.add_argument("--out", required=True, help="CSV path (SVG written alongside)")
    p.set_defaults(func=cmd_drift)

    p = sub.add_parser("train-tokenizer", help="train a unigram vocabulary")
    p.add_argument("corpus")
    _add_train_flags(p)
    _add_corpus_filter_flags(p)
    p.add_argument("--out", required=True, help="vocabulary TSV path")
    p.set_defaults(func=cmd_train_tokenizer)

    p = sub.add_parser("surgery", help="swap 256 rarest pieces for byte pieces")
    p.add_argument("vocab")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("freqdist", help="token frequencies of a corpus under a vocabulary")
    p.add_argument("vocab")
    p.add_argument("corpus")
    _add_corpus_filter_flags(p)
    p.add_argument("--out", required=True, help="frequency table JSON path")
    p.set_defaults(func=cmd_freqdist)

    p = sub.add_parser("mix-plan", help="per-step batch composition of a mixing schedule")
    p.add_argument("--kind", choices=["static", "sequential", "dynamic"], required=True)
    p.add_argument("--ratio-sm", type=float, required=True, help="in-domain fraction")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--batch-size", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_mix_plan)

    p = sub.add_parser("pack", help="pack token sequences into fixed-length records")
    p.add_argument("tokens", help="JSONL, one integer array per line")
    p.add_argument("--max-len", type=int, default=512)
    p.add_argument("--out", required=True, help="binary output path")
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("corrupt", help="span-corruption input/target pairs")
    p.add_argument("tokens", help="JSONL, one integer array per line")
    p.add_argument("--noise-density", type=float, default=0.15)
    p.add_argument("--mean-span", type=float, default=3.0)
    p.add_argument("--out", required=True, help="JSONL output path")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("score", help="score benchmark predictions")
    p.add_argument("task_dir", help="directory of <task>.jsonl prediction files")
    p.add_argument("--registry", default=None, help="task registry JSON (default: built-in)")
    p.add_argument("--out", required=True, help="summary JSON path")
    p.set_defaults(func=cmd_score)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"driftmix {args.command}: {exc}", file=sys.stderr)
        return exc.code
    except Exception as exc:  # noqa: BLE001
        print(f"driftmix {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
