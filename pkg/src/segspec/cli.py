"""``segspec`` command line: synth, extract, consistency, train, bench, spectrogram.

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import pipeline
from .classifier import TrainConfig, save_model, train
from .dsp import FrameConfig
from .errors import IoError, SegspecError
from .segmentation import Full, parse_policy
from .synth_corpus import gen_corpus, load_corpus_config, read_manifest

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _policy_arg(text: str):
    try:
        return parse_policy(text)
    except SegspecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _policy_list(text: str) -> list:
    return [_policy_arg(t) for t in text.split(",") if t.strip()]


def _floats(text: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _frame_config(args) -> FrameConfig:
    return FrameConfig(n_fft=args.n_fft, hop=args.hop)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_synth(args) -> int:
    config = load_corpus_config(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    try:
        Path(args.out).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"{args.out}: {exc.strerror or exc}") from exc
    manifest = gen_corpus(config, args.out)
    print(manifest.root / "manifest.csv")
    return EXIT_OK


def cmd_extract(args) -> int:
    manifest = read_manifest(args.manifest)
    result = pipeline.extract_corpus(manifest, args.policy, _frame_config(args), args.workers)
    out = Path(args.out)
    errors_path = Path(args.errors) if args.errors else out.with_name("errors.csv")
    pipeline.write_text(out, pipeline.format_features_csv(result.rows))
    pipeline.write_text(errors_path, pipeline.format_errors_csv(result.errors))
    _say(f"extracted {len(result.rows)}/{len(manifest.entries)} clips with {result.policy}")
    if not result.rows:
        _say(f"every clip failed; see {errors_path}")
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_consistency(args) -> int:
    manifest = read_manifest(args.manifest)
    policies = [p for group in args.policy for p in group]
    res = pipeline.consistency_corpus(manifest, policies, args.baseline, _frame_config(args), args.workers)
    pipeline.write_text(args.out, res.csv_text())
    if args.errors or res.errors:
        errors_path = Path(args.errors) if args.errors else Path(args.out).with_name("errors.csv")
        pipeline.write_text(errors_path, pipeline.format_errors_csv(res.errors))
    _say(f"clips={len(res.reports)} failed={len(res.errors)} "
         f"fraction_below_{args.tau:g}={res.fraction_below(args.tau):.4f}")
    return EXIT_OK if res.reports else EXIT_RUNTIME


def cmd_train(args) -> int:
    table = pipeline.read_features_csv(args.features)
    config = TrainConfig(lr=args.lr, batch_size=args.batch_size, epochs=args.epochs,
                         hidden_sizes=args.hidden, seed=args.seed if args.seed is not None else 0)
    result = train(table, tuple(args.split), config)
    out = Path(args.out)
    save_model(out, result.model)
    history = Path(args.history) if args.history else out.with_suffix(".history.csv")
    lines = ["epoch,loss,train_accuracy,eval_accuracy"]
    lines += [f"{h['epoch']},{h['loss']:.9g},{h['train_accuracy']:.9g},{h['eval_accuracy']:.9g}"
              for h in result.history]
    pipeline.write_text(history, "\n".join(lines) + "\n")
    print(f"eval_accuracy={result.eval_accuracy:.4f}")
    return EXIT_OK


def cmd_bench(args) -> int:
    manifest = read_manifest(args.manifest)
    policies = [p for group in args.policy for p in group] if args.policy else [Full()]
    report = pipeline.bench(manifest, policies, _frame_config(args), args.repeats)
    text = report.text()
    if args.out:
        pipeline.write_text(args.out, text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_spectrogram(args) -> int:
    height, width = pipeline.write_spectrogram(args.wav, args.out, _frame_config(args))
    _say(f"wrote {width}x{height} PGM to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="segspec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def frame_flags(p):
        p.add_argument("--n-fft", type=int, default=2048)
        p.add_argument("--hop", type=int, default=512)

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    p.add_argument("config", help="corpus config file (key = value lines)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override master_seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="extract a features CSV")
    p.add_argument("manifest")
    p.add_argument("--policy", type=_policy_arg, default=Full())
    p.add_argument("--out", required=True)
    p.add_argument("--errors", help="errors sidecar (default: errors.csv beside --out)")
    p.add_argument("--workers", type=int, default=1)
    frame_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("consistency", help="per-feature deviation against a baseline")
    p.add_argument("manifest")
    p.add_argument("--policy", type=_policy_list, action="append", required=True,
                   help="policy or comma list; repeatable")
    p.add_argument("--baseline", type=_policy_arg, default=Full())
    p.add_argument("--out", required=True)
    p.add_argument("--errors")
    p.add_argument("--tau", type=float, default=0.05)
    p.add_argument("--workers", type=int, default=1)
    frame_flags(p)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("train", help="train and evaluate the classifier")
    p.add_argument("features")
    p.add_argument("--out", required=True, help="model file")
    p.add_argument("--history", help="per-epoch CSV (default: <out>.history.csv)")
    p.add_argument("--seed", type=int)
    p.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument("--lr", type=float, default=TrainConfig.lr)
    p.add_argument("--hidden", type=_ints, default=TrainConfig.hidden_sizes)
    p.add_argument("--split", type=_floats, default=(0.8, 0.2))
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("bench", help="time extraction per policy")
    p.add_argument("manifest")
    p.add_argument("--policy", type=_policy_list, action="append")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--out")
    frame_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("spectrogram", help="write a PGM spectrogram image")
    p.add_argument("wav")
    p.add_argument("--out", required=True)
    frame_flags(p)
    p.set_defaults(func=cmd_spectrogram)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SegspecError, OSError) as exc:
        kind = type(exc).__name__ if isinstance(exc, SegspecError) else "IoError"
        _say(f"{kind}: {exc}")
        return EXIT_RUNTIME
    except ValueError as exc:
        _say(f"InvalidParams: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
