"""Corpus reading against the documented JSONL interface.

The adapter deliberately does not import the pipeline package; it reads the
same corpus files through the published field maps (dialogsum: fname /
dialogue / summary, cnndm: id / article / highlights, generic: id / document
/ summary) so data flows one way, from here into the pipeline's validators.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .config import AdapterError

_FIELD_MAPS = {
    "dialogsum_jsonl": ("fname", "dialogue", "summary"),
    "cnndm_jsonl": ("id", "article", "highlights"),
    "generic_jsonl": ("id", "document", "summary"),
}


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    document: str
    summary: str


def read_corpus(path: str | Path, corpus_format: str) -> list[CorpusRecord]:
    if corpus_format not in _FIELD_MAPS:
        raise AdapterError(f"unknown corpus format {corpus_format!r}")
    id_field, doc_field, summary_field = _FIELD_MAPS[corpus_format]
    records: list[CorpusRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise AdapterError(
                    f"{path}: invalid JSON at line {lineno}: {exc.msg}") from exc
            for field in (id_field, doc_field):
                if field not in obj or not isinstance(obj[field], str) or not obj[field]:
                    raise AdapterError(
                        f"{path}: line {lineno} misses required field {field!r}")
            rid = obj[id_field]
            if rid in seen:
                raise AdapterError(f"{path}: duplicate id {rid!r} at line {lineno}")
            seen.add(rid)
            summary = obj.get(summary_field, "")
            if not isinstance(summary, str):
                raise AdapterError(
                    f"{path}: line {lineno} field {summary_field!r} must be a string")
            records.append(CorpusRecord(rid, obj[doc_field], summary))
    return records
