"""Adapter configuration shared by the export and fine-tune commands."""

from __future__ import annotations

from dataclasses import dataclass


class AdapterError(RuntimeError):
    """Raised for adapter failures: bad inputs, model problems, schema drift."""


@dataclass
class AdapterConfig:
    tagger: str = "fixture"            # fixture | flair
    gazetteer: str | None = None       # JSON {surface: TYPE}, fixture tagger only
    extractive_model: str = "lead"     # lead | embed
    device: str = "cpu"
    batch_size: int = 16
    corpus: str | None = None
    corpus_format: str = "generic_jsonl"
    spans_out: str | None = None
    scores_out: str | None = None
    base_model: str = "meta-llama/Llama-2-7b-hf"
    finetune_config: str | None = None
    training_data: str | None = None
    output_dir: str = "adapter_out"
    dry_run: bool = False
    primary_cli: list[str] | None = None    # defaults to `python -m elemsum`
