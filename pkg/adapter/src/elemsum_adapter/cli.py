"""Adapter CLI: export-spans, export-scores, finetune."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .config import AdapterConfig
from .export import export_sentence_scores, export_spans
from .finetune import run_finetune


def _add_shared(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", help="corpus JSONL path")
    parser.add_argument("--format", dest="corpus_format", default=None,
                        choices=("dialogsum_jsonl", "cnndm_jsonl", "generic_jsonl"))
    parser.add_argument("--device", default=None)
    parser.add_argument("--batch-size", type=int, default=None)
    parser.add_argument("--primary-cli", default=None,
                        help="command used to invoke the pipeline CLI "
                             "(default: this interpreter's `-m elemsum`)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elemsum-adapter",
        description="Export NER spans and extractive sentence scores in the "
                    "pipeline's schemas; drive the LoRA fine-tune.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export-spans", help="run NER and emit span JSONL")
    _add_shared(p)
    p.add_argument("--tagger", choices=("fixture", "flair"), default=None)
    p.add_argument("--gazetteer", help="JSON gazetteer for the fixture tagger")
    p.add_argument("--spans-out", required=True)

    p = sub.add_parser("export-scores", help="score sentences and emit JSONL")
    _add_shared(p)
    p.add_argument("--extractive-model", choices=("lead", "embed"), default=None)
    p.add_argument("--scores-out", required=True)

    p = sub.add_parser("finetune", help="LoRA fine-tune on the emitted training set")
    _add_shared(p)
    p.add_argument("--base-model", default=None)
    p.add_argument("--finetune-config", required=True,
                   help="hyperparameter JSON emitted by the pipeline")
    p.add_argument("--training-data", required=True,
                   help="training JSONL emitted by the pipeline")
    p.add_argument("--output-dir", default=None)
    p.add_argument("--dry-run", action="store_true",
                   help="log the resolved configuration and train nothing")

    return parser


def _config_from_args(args: argparse.Namespace) -> AdapterConfig:
    config = AdapterConfig()
    for name in vars(config):
        if hasattr(args, name):
            value = getattr(args, name)
            if value is not None and value is not False:
                setattr(config, name, value)
    if getattr(args, "primary_cli", None):
        config.primary_cli = args.primary_cli.split()
    return config


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if args.command == "export-spans":
            target = export_spans(config)
            print(f"wrote {target}")
        elif args.command == "export-scores":
            target = export_sentence_scores(config)
            print(f"wrote {target}")
        elif args.command == "finetune":
            run_finetune(config)
    except Exception as exc:
        print(f"elemsum-adapter: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
