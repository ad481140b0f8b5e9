"""Command-line pipeline: analyze, select, conclude, annotate, build, score,
judge-prompts, judge-aggregate.

All subcommands read a shared declarative config (JSON file plus flag
overrides) and are deterministic for fixed inputs: rerunning a command
produces byte-identical outputs.  On any error the exit status is nonzero
and files written by the failed invocation are removed.  The ELEMSUM_WORKERS
environment variable sizes the worker pool for per-document stages; results
are merged in input order regardless of completion order.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Callable, Iterator, Sequence

from .annotate import AnnotatedDocument, AnnotationPlan, apply_plan, resolve_spans
from .conclusion import (SentenceScore, load_external_scores, pick_conclusion,
                         score_sentences)
from .corpus import CORPUS_FORMATS, Sample, load_corpus, segment_sentences
from .entities import EntitySpan, load_spans
from .evaluate import (DEFAULT_JUDGE_TEMPLATE, CandidateSummary,
                       aggregate_verdicts, emit_judge_prompts, entity_inclusion,
                       length_split, load_candidates, load_verdicts, rouge1)
from .jsonl import write_jsonl
from .keyselect import (SelectionConfig, compute_type_stats, format_stats_tsv,
                        select_types, stats_as_rows)
from .prompts import (DEFAULT_TEMPLATE, InstructionTemplate, build_instruction,
                      build_record, emit_finetune_config, emit_inference_set,
                      emit_training_set)

WORKERS_ENV = "ELEMSUM_WORKERS"

METRICS = ("rouge", "inclusion", "length")


@dataclass
class PipelineConfig:
    """Shared settings for every subcommand; flags mirror these fields."""

    corpus: str | None = None
    format: str = "generic_jsonl"
    spans: str | None = None
    threshold: float = 0.30
    explicit_types: list[str] | None = None
    conclusion_method: str = "centrality"
    external_scores: str | None = None
    open_token: str = "<"
    close_token: str = ">"
    conclusion_open: str = "<conclusion>"
    conclusion_close: str = "</conclusion>"
    template: str | None = None
    training_cap: int | None = None
    sample_seed: int | None = None
    mode: str = "train"
    out_dir: str = "out"

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")
        if self.mode not in ("train", "infer"):
            raise ValueError(f"mode must be 'train' or 'infer', got {self.mode!r}")


def _workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, n)


def _map_ordered(fn: Callable, items: Sequence) -> list:
    """Apply fn across items, fanning out to the worker pool; output keeps
    input order."""
    workers = _workers()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@contextmanager
def _fresh_outputs() -> Iterator[Callable[[str | Path], Path]]:
    """Track written files; remove them all if the command fails midway."""
    created: list[Path] = []

    def track(path: str | Path) -> Path:
        p = Path(path)
        created.append(p)
        return p

    try:
        yield track
    except BaseException:
        for p in created:
            try:
                p.unlink()
            except OSError:
                pass
        raise


def _out_dir(config: PipelineConfig) -> Path:
    path = Path(config.out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _load_corpus(config: PipelineConfig) -> list[Sample]:
    if not config.corpus:
        raise ValueError("no corpus path configured (--corpus)")
    return load_corpus(config.corpus, config.format)


def _load_spans(config: PipelineConfig) -> list[EntitySpan]:
    if not config.spans:
        raise ValueError("no span file configured (--spans)")
    return load_spans(config.spans)


def _load_template(config: PipelineConfig) -> InstructionTemplate:
    if config.template:
        return InstructionTemplate.from_file(config.template)
    return DEFAULT_TEMPLATE


def _selected_types(config: PipelineConfig, samples: Sequence[Sample],
                    spans: Sequence[EntitySpan]) -> list[str]:
    selection = SelectionConfig(threshold=config.threshold,
                                explicit_types=config.explicit_types)
    if selection.explicit_types is not None:
        return list(selection.explicit_types)
    stats = compute_type_stats(samples, spans)
    return select_types(stats, selection)


def _conclusions(config: PipelineConfig,
                 samples: Sequence[Sample]) -> list[tuple[list, list[SentenceScore], int]]:
    """Per sample: (sentence spans, scores, chosen index), in corpus order."""
    external = None
    if config.conclusion_method == "external":
        if not config.external_scores:
            raise ValueError("external conclusion method needs --external-scores")
        external = load_external_scores(config.external_scores)

    def one(sample: Sample):
        sentences = segment_sentences(sample.document, sample.domain_tag)
        scores = score_sentences(sample, config.conclusion_method, external=external)
        return sentences, scores, pick_conclusion(scores)

    return _map_ordered(one, samples)


def _annotated_docs(config: PipelineConfig, samples: Sequence[Sample],
                    spans: Sequence[EntitySpan], selected: Sequence[str],
                    picks: Sequence[tuple]) -> list[AnnotatedDocument]:
    doc_spans: dict[str, list[EntitySpan]] = {}
    for span in spans:
        if span.role == "document":
            doc_spans.setdefault(span.sample_id, []).append(span)

    def one(pair: tuple[Sample, tuple]) -> AnnotatedDocument:
        sample, (sentences, _scores, chosen) = pair
        plan = AnnotationPlan(
            sample_id=sample.id,
            entity_spans=resolve_spans(doc_spans.get(sample.id, ()), selected),
            conclusion_span=sentences[chosen],
            open_token=config.open_token,
            close_token=config.close_token,
            conclusion_open=config.conclusion_open,
            conclusion_close=config.conclusion_close,
        )
        return apply_plan(sample, plan)

    return _map_ordered(one, list(zip(samples, picks)))


def cmd_analyze(config: PipelineConfig) -> dict[str, Path]:
    """Write the per-entity-type ratio report (TSV and JSON)."""
    samples = _load_corpus(config)
    spans = _load_spans(config)
    stats = compute_type_stats(samples, spans)
    out = _out_dir(config)
    with _fresh_outputs() as track:
        tsv_path = track(out / "entity_stats.tsv")
        tsv_path.write_text(format_stats_tsv(stats), encoding="utf-8")
        json_path = track(out / "entity_stats.json")
        json_path.write_text(
            json.dumps(stats_as_rows(stats), ensure_ascii=False, indent=2,
                       sort_keys=True) + "\n",
            encoding="utf-8")
    return {"tsv": tsv_path, "json": json_path}


def cmd_select(config: PipelineConfig) -> dict[str, Path]:
    """Write the selected key entity types."""
    samples = _load_corpus(config)
    spans = _load_spans(config)
    selected = _selected_types(config, samples, spans)
    out = _out_dir(config)
    with _fresh_outputs() as track:
        path = track(out / "selected_types.json")
        path.write_text(
            json.dumps({
                "threshold": config.threshold,
                "explicit": config.explicit_types,
                "types": selected,
            }, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    return {"selected": path}


def cmd_conclude(config: PipelineConfig,
                 sentences_out: str | None = None) -> dict[str, Path]:
    """Pick the conclusion sentence per document; optionally export the
    sentence segmentation itself."""
    samples = _load_corpus(config)
    picks = _conclusions(config, samples)
    out = _out_dir(config)
    with _fresh_outputs() as track:
        path = track(out / "conclusions.jsonl")
        write_jsonl(path, (
            {
                "sample_id": sample.id,
                "sentence_index": chosen,
                "score": scores[chosen].score,
            }
            for sample, (_sentences, scores, chosen) in zip(samples, picks)
        ))
        outputs = {"conclusions": path}
        if sentences_out:
            spath = track(sentences_out)
            write_jsonl(spath, (
                {
                    "sample_id": sample.id,
                    "sentence_index": sentence.index,
                    "start_char": sentence.start_char,
                    "end_char": sentence.end_char,
                }
                for sample, (sentences, _scores, _chosen) in zip(samples, picks)
                for sentence in sentences
            ))
            outputs["sentences"] = spath
    return outputs


def cmd_annotate(config: PipelineConfig) -> dict[str, Path]:
    """Write the annotated corpus with its insertion maps."""
    samples = _load_corpus(config)
    spans = _load_spans(config)
    selected = _selected_types(config, samples, spans)
    picks = _conclusions(config, samples)
    docs = _annotated_docs(config, samples, spans, selected, picks)
    out = _out_dir(config)
    with _fresh_outputs() as track:
        path = track(out / "annotated.jsonl")
        write_jsonl(path, (
            {
                "id": doc.sample_id,
                "annotated": doc.annotated,
                "insertions": [[offset, token] for offset, token in doc.insertions],
            }
            for doc in docs
        ))
    return {"annotated": path}


def cmd_build(config: PipelineConfig) -> dict[str, Path]:
    """Run the full data-construction pipeline and write every artifact."""
    samples = _load_corpus(config)
    spans = _load_spans(config)
    selected = _selected_types(config, samples, spans)
    picks = _conclusions(config, samples)
    docs = _annotated_docs(config, samples, spans, selected, picks)
    template = _load_template(config)
    instruction = build_instruction(template, selected)
    records = [
        build_record(instruction, doc,
                     sample.summary if config.mode == "train" else None,
                     config.mode)
        for sample, doc in zip(samples, docs)
    ]
    out = _out_dir(config)
    with _fresh_outputs() as track:
        selected_path = track(out / "selected_types.json")
        selected_path.write_text(
            json.dumps({
                "threshold": config.threshold,
                "explicit": config.explicit_types,
                "types": selected,
            }, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")

        conclusions_path = track(out / "conclusions.jsonl")
        write_jsonl(conclusions_path, (
            {
                "sample_id": sample.id,
                "sentence_index": chosen,
                "score": scores[chosen].score,
            }
            for sample, (_sentences, scores, chosen) in zip(samples, picks)
        ))

        annotated_path = track(out / "annotated.jsonl")
        write_jsonl(annotated_path, (
            {
                "id": doc.sample_id,
                "annotated": doc.annotated,
                "insertions": [[offset, token] for offset, token in doc.insertions],
            }
            for doc in docs
        ))

        if config.mode == "train":
            data_path = track(out / "train.jsonl")
            lines = emit_training_set(records, data_path, template=template,
                                      cap=config.training_cap,
                                      sample_seed=config.sample_seed)
        else:
            data_path = track(out / "prompts.jsonl")
            lines = emit_inference_set(records, data_path, template=template)

        finetune_path = track(out / "finetune_config.json")
        emit_finetune_config(finetune_path)

        manifest_path = track(out / "build_manifest.json")
        manifest = {
            "command": "build",
            "corpus": config.corpus,
            "format": config.format,
            "spans": config.spans,
            "threshold": config.threshold,
            "explicit_types": config.explicit_types,
            "selected_types": selected,
            "conclusion_method": config.conclusion_method,
            "external_scores": config.external_scores,
            "open_token": config.open_token,
            "close_token": config.close_token,
            "conclusion_open": config.conclusion_open,
            "conclusion_close": config.conclusion_close,
            "template": config.template,
            "mode": config.mode,
            "training_cap": config.training_cap,
            "sample_seed": config.sample_seed,
            "counts": {"samples": len(samples), "emitted_lines": lines},
        }
        manifest_path.write_text(
            json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    return {
        "selected": selected_path,
        "conclusions": conclusions_path,
        "annotated": annotated_path,
        "data": data_path,
        "finetune_config": finetune_path,
        "manifest": manifest_path,
    }


def _check_unique(system: str, candidates: Sequence[CandidateSummary]) -> None:
    seen: set[str] = set()
    for cand in candidates:
        if cand.sample_id in seen:
            raise ValueError(
                f"system {system!r} has multiple candidates for sample "
                f"{cand.sample_id!r}")
        seen.add(cand.sample_id)


def cmd_score(config: PipelineConfig, candidates_path: str,
              metrics: Sequence[str] | None = None) -> dict[str, Path]:
    """Score candidate summaries and write the per-system report."""
    samples = _load_corpus(config)
    by_id = {s.id: s for s in samples}
    candidates = load_candidates(candidates_path)
    for cand in candidates:
        if cand.sample_id not in by_id:
            raise ValueError(
                f"candidate references unknown sample {cand.sample_id!r}")

    spans = load_spans(config.spans) if config.spans else []
    ref_spans = [s for s in spans if s.role == "summary"]
    if metrics is None:
        metrics = ["rouge", "length"] + (["inclusion"] if ref_spans else [])
    unknown = set(metrics) - set(METRICS)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    if "inclusion" in metrics and not ref_spans:
        raise ValueError("inclusion metric needs summary-role spans (--spans)")

    groups: dict[str, list[CandidateSummary]] = {}
    for cand in candidates:
        groups.setdefault(cand.system, []).append(cand)

    report: dict[str, dict] = {}
    table_lines: list[str] = []
    for system in sorted(groups):
        group = groups[system]
        _check_unique(system, group)
        section: dict = {"candidates": len(group)}
        if "rouge" in metrics:
            scores = _map_ordered(
                lambda c: rouge1(c.text, by_id[c.sample_id].summary), group)
            n = len(scores)
            section["rouge1"] = {
                "precision": sum(s.precision for s in scores) / n,
                "recall": sum(s.recall for s in scores) / n,
                "f1": sum(s.f1 for s in scores) / n,
            }
        if "inclusion" in metrics:
            inclusion = entity_inclusion(ref_spans, group,
                                         known_sample_ids=set(by_id))
            section["entity_inclusion"] = {
                "total": inclusion.total,
                "included": inclusion.included,
                "overall_ratio": inclusion.overall_ratio,
                "per_etype": {
                    etype: {"total": t.total, "included": t.included,
                            "ratio": t.ratio}
                    for etype, t in inclusion.per_etype.items()
                },
            }
        if "length" in metrics:
            split = length_split(samples, group)
            section["length_split"] = {
                "threshold": split.threshold,
                "short": {
                    "count": split.short.count,
                    "mean_doc_len": round(split.short.mean_doc_len, 1),
                    "mean_summary_len": round(split.short.mean_summary_len, 1),
                },
                "long": {
                    "count": split.long.count,
                    "mean_doc_len": round(split.long.mean_doc_len, 1),
                    "mean_summary_len": round(split.long.mean_summary_len, 1),
                },
            }
        report[system] = section
        cells = [system]
        if "rouge1" in section:
            cells.append(f"rouge1-f1={section['rouge1']['f1']:.3f}")
        if "entity_inclusion" in section:
            cells.append(
                f"inclusion={section['entity_inclusion']['overall_ratio']:.3f}")
        if "length_split" in section:
            cells.append(
                f"short={section['length_split']['short']['count']}"
                f"/long={section['length_split']['long']['count']}")
        table_lines.append("  ".join(cells))

    out = _out_dir(config)
    with _fresh_outputs() as track:
        path = track(out / "score_report.json")
        path.write_text(
            json.dumps({"systems": report}, ensure_ascii=False, indent=2,
                       sort_keys=True) + "\n",
            encoding="utf-8")
    print("\n".join(table_lines))
    return {"report": path}


def cmd_judge_prompts(config: PipelineConfig, candidates_path: str,
                      judge_template_path: str | None = None) -> dict[str, Path]:
    """Emit hallucination-judge prompts for every (sample, system) pair."""
    samples = _load_corpus(config)
    candidates = load_candidates(candidates_path)
    template = DEFAULT_JUDGE_TEMPLATE
    if judge_template_path:
        template = Path(judge_template_path).read_text(encoding="utf-8")
    out = _out_dir(config)
    with _fresh_outputs() as track:
        path = track(out / "judge_prompts.jsonl")
        emit_judge_prompts(samples, candidates, path, template)
    return {"prompts": path}


def cmd_judge_aggregate(config: PipelineConfig,
                        verdicts_path: str) -> dict[str, Path]:
    """Aggregate judge verdicts into per-system mean hallucination counts."""
    verdicts = load_verdicts(verdicts_path)
    result = aggregate_verdicts(verdicts)
    out = _out_dir(config)
    with _fresh_outputs() as track:
        path = track(out / "judge_report.json")
        path.write_text(
            json.dumps({
                "means": result.means,
                "per_sample": [
                    {
                        "sample_id": v.sample_id,
                        "system": v.system,
                        "hallucination_count": v.hallucination_count,
                        "rationale": v.rationale,
                    }
                    for v in result.table
                ],
            }, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    for system, mean in result.means.items():
        print(f"{system}  mean_hallucinations_per_dialogue={mean:.3f}")
    return {"report": path}


_CONFIG_FLAGS: dict[str, dict] = {
    "corpus": {"help": "corpus JSONL path"},
    "format": {"choices": CORPUS_FORMATS, "help": "corpus format"},
    "spans": {"help": "entity span JSONL path"},
    "threshold": {"type": float, "help": "selection ratio threshold"},
    "explicit_types": {"flag": "--types", "help":
                       "comma-separated entity types overriding the threshold"},
    "conclusion_method": {"flag": "--method",
                          "choices": ("centrality", "external"),
                          "help": "conclusion scoring method"},
    "external_scores": {"help": "external sentence score JSONL path"},
    "open_token": {"help": "entity emphasis opening token"},
    "close_token": {"help": "entity emphasis closing token"},
    "conclusion_open": {"help": "conclusion opening token"},
    "conclusion_close": {"help": "conclusion closing token"},
    "template": {"help": "instruction template JSON path"},
    "training_cap": {"flag": "--cap", "type": int,
                     "help": "keep at most N training records"},
    "sample_seed": {"flag": "--seed", "type": int,
                    "help": "seed for random subset sampling (with --cap)"},
    "mode": {"choices": ("train", "infer"), "help": "prompt mode"},
    "out_dir": {"help": "output directory"},
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override it")
    for name, spec in _CONFIG_FLAGS.items():
        flag = spec.get("flag", "--" + name.replace("_", "-"))
        kwargs = {k: v for k, v in spec.items() if k != "flag"}
        parser.add_argument(flag, dest=name, default=None, **kwargs)


def _resolve_config(args: argparse.Namespace) -> PipelineConfig:
    data: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            file_data = json.load(fh)
        if not isinstance(file_data, dict):
            raise ValueError(f"config file {args.config} must hold a JSON object")
        known = {f.name for f in fields(PipelineConfig)}
        unknown = set(file_data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update(file_data)
    for name in _CONFIG_FLAGS:
        value = getattr(args, name)
        if value is not None:
            if name == "explicit_types":
                value = [t.strip() for t in value.split(",") if t.strip()]
            data[name] = value
    return PipelineConfig(**data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elemsum",
        description="Build key-element-annotated instruction data for "
                    "summarization and score model summaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="per-entity-type ratio report")
    _add_config_flags(p)

    p = sub.add_parser("select", help="pick key entity types")
    _add_config_flags(p)

    p = sub.add_parser("conclude", help="pick the conclusion sentence per document")
    _add_config_flags(p)
    p.add_argument("--sentences-out",
                   help="also export sentence spans to this JSONL path")

    p = sub.add_parser("annotate", help="write the annotated corpus")
    _add_config_flags(p)

    p = sub.add_parser("build", help="full pipeline: select, conclude, annotate, emit prompts")
    _add_config_flags(p)

    p = sub.add_parser("score", help="score candidate summaries")
    _add_config_flags(p)
    p.add_argument("--candidates", required=True, help="candidate summary JSONL")
    p.add_argument("--metrics",
                   help="comma-separated subset of rouge,inclusion,length")

    p = sub.add_parser("judge-prompts", help="emit hallucination judge prompts")
    _add_config_flags(p)
    p.add_argument("--candidates", required=True, help="candidate summary JSONL")
    p.add_argument("--judge-template", help="text file with {document}/{summary} placeholders")

    p = sub.add_parser("judge-aggregate", help="aggregate judge verdicts")
    _add_config_flags(p)
    p.add_argument("--verdicts", required=True, help="verdict JSONL")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        if args.command == "analyze":
            cmd_analyze(config)
        elif args.command == "select":
            cmd_select(config)
        elif args.command == "conclude":
            cmd_conclude(config, sentences_out=args.sentences_out)
        elif args.command == "annotate":
            cmd_annotate(config)
        elif args.command == "build":
            cmd_build(config)
        elif args.command == "score":
            metrics = None
            if args.metrics:
                metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
            cmd_score(config, args.candidates, metrics)
        elif args.command == "judge-prompts":
            cmd_judge_prompts(config, args.candidates, args.judge_template)
        elif args.command == "judge-aggregate":
            cmd_judge_aggregate(config, args.verdicts)
        else:  # pragma: no cover - argparse enforces the choices
            raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:
        print(f"elemsum: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
