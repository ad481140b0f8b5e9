"""Instruction assembly and training-set emission.

A prompt record is the concatenation of an instruction, the annotated
("converted") document, and, for training, the reference summary.  The
instruction text itself is configuration: the default template states the
task, explains the emphasis and conclusion markers, and demands accurate
generation.  Rendering is deterministic so repeated builds are byte-stable.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Literal, Sequence

from .annotate import AnnotatedDocument

Mode = Literal["train", "infer"]

DEFAULT_FINETUNE_CONFIG = {
    "lora_rank": 8,
    "lora_alpha": 32,
    "lora_dropout": 0.05,
    "epochs": 3,
}


@dataclass(frozen=True)
class InstructionTemplate:
    """Pieces of the instruction plus the separators around the document.

    entity_explanation must contain a "{types}" placeholder; it is dropped
    entirely when no entity types are selected, while the conclusion
    explanation always stays.  sep_summary doubles as the response cue that
    ends inference prompts.
    """

    task_definition: str = (
        "Summarize the following document in a few concise sentences."
    )
    entity_explanation: str = (
        "Key entities of types {types} are emphasized in the document by "
        "surrounding them with the tokens < and >; the summary must mention "
        "these entities."
    )
    conclusion_explanation: str = (
        "The main point of the document is marked between <conclusion> and "
        "</conclusion>; build the summary around it."
    )
    accuracy_clause: str = (
        "Generate an accurate summary: include the emphasized elements and "
        "state only facts that appear in the document."
    )
    sep_document: str = "\n\n### Document:\n"
    sep_summary: str = "\n\n### Summary:\n"

    def __post_init__(self) -> None:
        if not (self.task_definition and self.entity_explanation
                and self.conclusion_explanation and self.accuracy_clause):
            raise ValueError("template text parts must be nonempty")

    @classmethod
    def from_file(cls, path: str | Path) -> "InstructionTemplate":
        """Load overrides from a JSON object keyed by field name."""
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"template file {path} must hold a JSON object")
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown template fields: {sorted(unknown)}")
        return replace(cls(), **data)


DEFAULT_TEMPLATE = InstructionTemplate()


@dataclass(frozen=True)
class PromptRecord:
    sample_id: str
    instruction: str
    converted_document: str
    reference_summary: str | None
    mode: Mode


def build_instruction(
    template: InstructionTemplate, selected: Sequence[str]
) -> str:
    """Assemble the instruction text, naming the selected entity types.

    Identical inputs yield byte-identical output.  An empty selection omits
    the entity clause but keeps the conclusion clause.
    """
    parts = [template.task_definition]
    if selected:
        parts.append(template.entity_explanation.format(types=", ".join(selected)))
    parts.append(template.conclusion_explanation)
    parts.append(template.accuracy_clause)
    return " ".join(parts)


def build_record(
    instruction: str,
    doc: AnnotatedDocument,
    summary: str | None,
    mode: Mode,
) -> PromptRecord:
    """Combine instruction and converted document into a prompt record.

    Training records require a nonempty reference summary; inference records
    must not carry one.
    """
    if mode == "train":
        if not summary:
            raise ValueError(f"training record for {doc.sample_id!r} needs a summary")
    elif mode == "infer":
        if summary:
            raise ValueError(
                f"inference record for {doc.sample_id!r} must not carry a summary")
        summary = None
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return PromptRecord(
        sample_id=doc.sample_id,
        instruction=instruction,
        converted_document=doc.annotated,
        reference_summary=summary,
        mode=mode,
    )


def render_prompt(record: PromptRecord, template: InstructionTemplate) -> str:
    """Instruction + document + response cue (everything before the summary)."""
    return (record.instruction + template.sep_document
            + record.converted_document + template.sep_summary)


def render_full(record: PromptRecord, template: InstructionTemplate) -> str:
    """The complete training string: prompt followed by the reference summary."""
    rendered = render_prompt(record, template)
    if record.mode == "train":
        rendered += record.reference_summary or ""
    return rendered


def emit_training_set(
    records: Sequence[PromptRecord],
    path: str | Path,
    *,
    template: InstructionTemplate = DEFAULT_TEMPLATE,
    cap: int | None = None,
    sample_seed: int | None = None,
) -> int:
    """Write training JSONL rows {id, prompt, completion}; returns line count.

    All records must be in train mode.  With a cap, the first N records are
    kept; with both a cap and a seed, a seeded input-order-preserving random
    subset is taken instead.
    """
    for record in records:
        if record.mode != "train":
            raise ValueError(
                f"record {record.sample_id!r} has mode {record.mode!r}, "
                "training sets accept train records only")
    chosen = list(records)
    if cap is not None and cap < len(chosen):
        if sample_seed is not None:
            picked = sorted(random.Random(sample_seed).sample(range(len(chosen)), cap))
            chosen = [chosen[i] for i in picked]
        else:
            chosen = chosen[:cap]
    with open(path, "w", encoding="utf-8") as fh:
        for record in chosen:
            fh.write(json.dumps({
                "id": record.sample_id,
                "prompt": render_prompt(record, template),
                "completion": record.reference_summary,
            }, ensure_ascii=False))
            fh.write("\n")
    return len(chosen)


def emit_inference_set(
    records: Sequence[PromptRecord],
    path: str | Path,
    *,
    template: InstructionTemplate = DEFAULT_TEMPLATE,
) -> int:
    """Write inference JSONL rows {id, prompt}; prompts end with the cue."""
    for record in records:
        if record.mode != "infer":
            raise ValueError(
                f"record {record.sample_id!r} has mode {record.mode!r}, "
                "inference sets accept infer records only")
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps({
                "id": record.sample_id,
                "prompt": render_prompt(record, template),
            }, ensure_ascii=False))
            fh.write("\n")
    return len(records)


def emit_finetune_config(path: str | Path, **overrides) -> dict:
    """Write the fine-tune hyperparameter JSON and return it.

    Defaults are lora_rank=8, lora_alpha=32, lora_dropout=0.05, epochs=3;
    overrides replace or extend them.
    """
    config = dict(DEFAULT_FINETUNE_CONFIG)
    config.update(overrides)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")
    return config


def load_finetune_config(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError(f"finetune config {path} must hold a JSON object")
    return config
