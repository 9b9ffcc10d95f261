"""Command-line interface chaining all pipeline stages.

Subcommands: gen, filter, merge, postprocess, ingest, stitch, sample,
tokenize, eval, stats.  Exit codes: 0 success, 1 usage error, 2 data error.
With a fixed --seed, every subcommand produces byte-identical artifacts
across runs and across --jobs values.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from . import bpe, corpus, curriculum, io, keypoints, metrics, stitch, templates
from .pose import default_selection


class UsageError(Exception):
    """Bad invocation detected after parsing; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the CLI contract is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def load_config(path) -> dict[str, str]:
    """Flat 'key = value' lines; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise io.DataError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
    return values


def _setting(args, config: dict[str, str], name: str, cast, default):
    """Precedence: explicit flag > config file > default."""
    flag = getattr(args, name, None)
    if flag is not None:
        return flag
    if name in config:
        return cast(config[name])
    return default


def _read_corpus(path, as_text: bool):
    if as_text:
        return io.read_text_corpus(path)
    return io.read_manifest(path)


def _read_vocab_words(args) -> set[str]:
    with open(args.vocab, encoding="utf-8") as fh:
        return {line.strip().lower() for line in fh if line.strip()}


def _cmd_gen(args, config) -> int:
    pack = templates.load_templates(args.templates)
    lex = templates.load_slot_lexicon(args.lexicon)
    records = []
    for template in pack:
        if args.sample is not None:
            stream = templates.sample_expansions(template, lex, args.sample, args.seed)
        else:
            stream = templates.expand_all(template, lex, limit=args.limit)
        records.extend(stream)
    io.write_manifest(args.out, records)
    if args.stats:
        io.write_stats(args.stats, io.compute_stats(records))
    print(f"gen: {len(records)} sentences from {len(pack)} templates -> {args.out}")
    return 0


def _cmd_filter(args, config) -> int:
    vocab = _read_vocab_words(args)
    sentences = _read_corpus(args.input, args.text)
    min_rate = _setting(args, config, "min_rate", float, 0.9)
    kept = list(corpus.filter_corpus(sentences, vocab, min_rate))
    io.write_manifest(args.out, kept)
    print(f"filter: kept {len(kept)}/{len(sentences)} sentences (match rate > {min_rate})")
    return 0


def _cmd_merge(args, config) -> int:
    sentences = io.read_manifest(args.input)
    policy = corpus.MergePolicy(
        max_len=_setting(args, config, "max_len", int, 8),
        fraction=_setting(args, config, "fraction", float, 0.9),
        group=_setting(args, config, "group", int, 3),
    )
    merged = corpus.merge_short(sentences, policy, seed=args.seed)
    io.write_manifest(args.out, merged)
    stats = corpus.length_stats(merged)
    print(
        f"merge: {len(sentences)} -> {len(merged)} sentences, "
        f"mean length {stats.mean:.2f}"
    )
    return 0


def _cmd_postprocess(args, config) -> int:
    sentences = io.read_manifest(args.input)
    names: set[str] = set()
    if args.names:
        with open(args.names, encoding="utf-8") as fh:
            names = {line.strip() for line in fh if line.strip()}
    extra = []
    for path in args.count_extra or []:
        extra.extend(io.read_manifest(path))
    min_freq = _setting(args, config, "min_freq", int, 3)
    out = corpus.replace_rare_and_names(sentences, names, min_freq, extra_counts=extra)
    io.write_manifest(args.out, out)
    n_person = sum(tok == corpus.PERSON_TOKEN for r in out for tok in r.text)
    n_unknown = sum(tok == corpus.UNKNOWN_TOKEN for r in out for tok in r.text)
    print(f"postprocess: {n_person} person tokens, {n_unknown} unknown tokens")
    return 0


def _cmd_ingest(args, config) -> int:
    raw_dir = Path(args.raw_dir)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    threshold = _setting(args, config, "threshold", float, 0.8)
    selection = default_selection()
    paths = sorted(raw_dir.glob("*.jsonl"))
    if not paths:
        raise io.DataError(f"{raw_dir}: no .jsonl raw landmark files")

    def work(path: Path):
        frames = io.read_raw_landmark_file(path)
        patched, report = keypoints.interpolate_low_confidence(frames, threshold)
        seq = keypoints.flatten_video(patched, selection, source_id=path.stem)
        io.write_pose_file(out_dir / f"{path.stem}{io.POSE_FILE_SUFFIX}", seq)
        return path.stem, len(seq), report

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(work, paths))
    else:
        results = [work(p) for p in paths]
    filled = sum(r.keypoints_filled for _, _, r in results)
    unresolved = sum(r.unresolved for _, _, r in results)
    print(
        f"ingest: {len(results)} words -> {out_dir} "
        f"(filled {filled} keypoints, {unresolved} unresolved)"
    )
    return 0


def _cmd_stitch(args, config) -> int:
    records = io.read_manifest(args.manifest)
    lex = io.load_sign_lexicon(args.lexicon_dir)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jitter = tuple(int(x) for x in args.jitter.split(",")) if args.jitter else (1,)
    cfg = stitch.StitchConfig(
        word_order=args.word_order,
        jitter_strides=jitter,
        crossfade_frames=_setting(args, config, "crossfade_frames", int, 2),
        seed=args.seed,
    )
    target_mean = _setting(args, config, "target_mean_frames", float, None)
    if target_mean is None:
        raise UsageError("--target-mean is required (or target_mean_frames in --config)")

    def write_pose(record, sequence) -> str:
        path = out_dir / f"{record.id}{io.POSE_FILE_SUFFIX}"
        io.write_pose_file(path, sequence)
        return str(path)

    result = stitch.stitch_dataset(
        records,
        lex,
        cfg,
        target_mean_frames=target_mean,
        write_pose=write_pose,
        skip_oov=args.skip_oov,
        jobs=args.jobs,
    )
    io.write_manifest(args.out_manifest, result.records)
    print(
        f"stitch: {len(result.records)} sentences (skipped {result.skipped}), "
        f"base stride {result.base_stride}, "
        f"mean frames {result.frame_histogram.mean:.1f}"
    )
    return 0


def _cmd_sample(args, config) -> int:
    sched = curriculum.AnnealSchedule(
        max_real_fraction=_setting(args, config, "max_real_fraction", float, 0.85),
        ramp_steps=_setting(args, config, "ramp_steps", int, 60_000),
    )
    curriculum.write_schedule_csv(
        args.out, args.total_steps, sched, args.seed, args.real_size, args.synth_size
    )
    print(f"sample: {args.total_steps} steps -> {args.out}")
    return 0


def _cmd_tokenize(args, config) -> int:
    if args.action == "train":
        sentences = [r.text for r in io.read_manifest(args.input)]
        for path in args.extra or []:
            sentences.extend(r.text for r in io.read_manifest(path))
        vocab_size = _setting(args, config, "vocab_size", int, 15_000)
        model = bpe.bpe_train(sentences, vocab_size)
        bpe.save_model(args.model, model)
        print(f"tokenize train: vocab {len(model.vocab)}, {len(model.merges)} merges")
        return 0
    if args.out is None:
        raise UsageError("tokenize encode requires --out")
    model = bpe.load_model(args.model)
    records = io.read_manifest(args.input)
    with open(args.out, "w", encoding="utf-8") as fh:
        for record in records:
            ids = bpe.encode(model, " ".join(record.text))
            fh.write(json.dumps({"id": record.id, "ids": ids}) + "\n")
    print(f"tokenize encode: {len(records)} sentences -> {args.out}")
    return 0


def _cmd_eval(args, config) -> int:
    pairs = []
    with open(args.input, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                pair = (
                    metrics.tokenize_for_metrics(obj["candidate"]),
                    metrics.tokenize_for_metrics(obj["reference"]),
                )
            except (json.JSONDecodeError, KeyError) as exc:
                raise io.DataError(f"{args.input}:{lineno}: {exc}") from None
            pairs.append(pair)
    report = metrics.eval_pairs(pairs, smooth=args.smooth)
    for n in sorted(report.bleu):
        print(f"BLEU-{n}: {report.bleu[n]:.2f}")
    for name, triple in (("ROUGE-1", report.rouge1), ("ROUGE-2", report.rouge2),
                         ("ROUGE-L", report.rougeL)):
        print(f"{name}: P={triple[0]:.4f} R={triple[1]:.4f} F1={triple[2]:.4f}")
    print(f"pairs: {report.n_pairs}  profile: {report.profile}")
    if args.out:
        io.write_stats(args.out, report.as_dict())
    return 0


def _cmd_stats(args, config) -> int:
    records = io.read_manifest(args.manifest)
    stats = io.compute_stats(records)
    io.write_stats(args.out, stats)
    if args.hist_csv:
        prefix = Path(args.hist_csv)
        io.write_histogram_csv(
            prefix.with_name(prefix.name + "_lengths.csv"),
            corpus.length_stats(records),
        )
        io.write_histogram_csv(
            prefix.with_name(prefix.name + "_frames.csv"),
            corpus.LengthHistogram.from_lengths(
                r.n_frames for r in records if r.n_frames is not None
            ),
        )
    print(json.dumps(stats, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="signsynth", description=__doc__)
    parser.add_argument("--seed", type=int, default=0, help="global seed")
    parser.add_argument("--config", type=str, default=None, help="flat key=value config file")
    parser.add_argument("--jobs", type=int, default=1, help="parallel workers")
    parser.add_argument("--skip-oov", action="store_true",
                        help="drop out-of-lexicon tokens instead of failing")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="expand templates into a sentence manifest")
    p.add_argument("--templates", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--limit", type=int, default=None, help="cap expansions per template")
    p.add_argument("--sample", type=int, default=None,
                   help="sample this many sentences per template instead of enumerating")
    p.add_argument("--out", required=True)
    p.add_argument("--stats", default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("filter", help="keep corpus sentences matching the vocabulary")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--vocab", required=True, help="word list, one per line")
    p.add_argument("--min-rate", dest="min_rate", type=float, default=None)
    p.add_argument("--text", action="store_true", help="input is plain text, not JSONL")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("merge", help="merge short sentences to match length distribution")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--max-len", dest="max_len", type=int, default=None)
    p.add_argument("--fraction", type=float, default=None)
    p.add_argument("--group", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_merge)

    p = sub.add_parser("postprocess", help="replace names and rare words")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--names", default=None, help="gazetteer, one name per line")
    p.add_argument("--min-freq", dest="min_freq", type=int, default=None)
    p.add_argument("--count-extra", nargs="*", default=None,
                   help="additional manifests included in the frequency pass")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_postprocess)

    p = sub.add_parser("ingest", help="raw landmark files -> word pose files")
    p.add_argument("--raw-dir", dest="raw_dir", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("stitch", help="sentences + sign lexicon -> pose dataset")
    p.add_argument("--manifest", required=True)
    p.add_argument("--lexicon-dir", dest="lexicon_dir", required=True)
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.add_argument("--out-manifest", dest="out_manifest", required=True)
    p.add_argument("--target-mean", dest="target_mean_frames", type=float, default=None)
    p.add_argument("--word-order", dest="word_order", choices=("swo", "rwo"), default="swo")
    p.add_argument("--crossfade", dest="crossfade_frames", type=int, default=None)
    p.add_argument("--jitter", default=None, help="comma-separated strides, e.g. 1,2,3")
    p.set_defaults(func=_cmd_stitch)

    p = sub.add_parser("sample", help="export curriculum mixture schedule CSV")
    p.add_argument("--total-steps", dest="total_steps", type=int, required=True)
    p.add_argument("--real-size", dest="real_size", type=int, required=True)
    p.add_argument("--synth-size", dest="synth_size", type=int, required=True)
    p.add_argument("--max-real", dest="max_real_fraction", type=float, default=None)
    p.add_argument("--ramp", dest="ramp_steps", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("tokenize", help="train or apply the BPE tokenizer")
    p.add_argument("action", choices=("train", "encode"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--extra", nargs="*", default=None,
                   help="extra manifests for training (e.g. the real train split)")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab-size", dest="vocab_size", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_tokenize)

    p = sub.add_parser("eval", help="BLEU/ROUGE over candidate-reference pairs")
    p.add_argument("--in", dest="input", required=True,
                   help='JSONL of {"id", "candidate", "reference"}')
    p.add_argument("--smooth", action="store_true", help="exp smoothing for zero counts")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("stats", help="manifest statistics and histogram CSVs")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--hist-csv", dest="hist_csv", default=None,
                   help="prefix for *_lengths.csv / *_frames.csv")
    p.set_defaults(func=_cmd_stats)
    return parser


def cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = load_config(args.config) if args.config else {}
        return args.func(args, config)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"signsynth: error: {exc}", file=sys.stderr)
        return 1
    except (io.DataError, templates.TemplateParseError) as exc:
        print(f"signsynth: data error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"signsynth: data error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    raise SystemExit(cli())


if __name__ == "__main__":
    main()
