"""Span and sentence-score export in the pipeline's file schemas.

Outputs are written to a temp file and renamed into place only after every
row has been produced and checked, so a failing run never leaves a partial
file.  Sentence boundaries come from the pipeline CLI itself (`elemsum
conclude --sentences-out`), which guarantees the exported scores line up
with the segmentation the pipeline will use.
"""

from __future__ import annotations

import json
import math
import os
import subprocess
import sys
import tempfile
from pathlib import Path
from typing import Iterable

from .config import AdapterConfig, AdapterError
from .corpus_io import read_corpus
from .scoring import make_scorer
from .taggers import make_tagger


def _atomic_write_jsonl(path: str | Path, rows: Iterable[dict]) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    n = 0
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")
                n += 1
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()
    return n


def _write_meta(target: Path, meta: dict) -> None:
    meta_path = target.with_suffix(target.suffix + ".meta.json")
    meta_path.write_text(json.dumps(meta, ensure_ascii=False, indent=2,
                                    sort_keys=True) + "\n", encoding="utf-8")


def export_spans(config: AdapterConfig) -> Path:
    """Tag documents and summaries, emitting the span JSONL schema.

    Every span's surface is re-read from the text at its offsets before
    emission; a tagger that returns drifting offsets aborts the export.
    """
    if not config.corpus:
        raise AdapterError("export_spans needs --corpus")
    if not config.spans_out:
        raise AdapterError("export_spans needs --spans-out")
    records = read_corpus(config.corpus, config.corpus_format)
    tagger = make_tagger(config)

    rows: list[dict] = []
    for record in records:
        for role, text in (("document", record.document),
                           ("summary", record.summary)):
            if not text:
                continue
            for start, end, etype in tagger.tag(text):
                if not (0 <= start < end <= len(text)):
                    raise AdapterError(
                        f"tagger produced offsets {start}..{end} outside "
                        f"{role} of sample {record.id!r}; refusing to emit")
                rows.append({
                    "sample_id": record.id,
                    "role": role,
                    "start_char": start,
                    "end_char": end,
                    "etype": etype,
                    "surface": text[start:end],
                    "source": tagger.name,
                })
    target = Path(config.spans_out)
    _atomic_write_jsonl(target, rows)
    _write_meta(target, {"tagger": tagger.name, "corpus": str(config.corpus),
                         "spans": len(rows)})
    return target


def fetch_sentence_boundaries(config: AdapterConfig) -> dict[str, list[dict]]:
    """Ask the pipeline CLI for its sentence segmentation of the corpus."""
    command = list(config.primary_cli or [sys.executable, "-m", "elemsum"])
    with tempfile.TemporaryDirectory() as scratch:
        sentences_path = Path(scratch) / "sentences.jsonl"
        completed = subprocess.run(
            command + [
                "conclude",
                "--corpus", str(config.corpus),
                "--format", config.corpus_format,
                "--out-dir", str(Path(scratch) / "out"),
                "--sentences-out", str(sentences_path),
            ],
            capture_output=True, text=True,
        )
        if completed.returncode != 0:
            raise AdapterError(
                f"pipeline CLI failed to segment the corpus: "
                f"{completed.stderr.strip() or completed.stdout.strip()}")
        boundaries: dict[str, list[dict]] = {}
        with open(sentences_path, encoding="utf-8") as fh:
            for raw in fh:
                if raw.strip():
                    row = json.loads(raw)
                    boundaries.setdefault(row["sample_id"], []).append(row)
    for rows in boundaries.values():
        rows.sort(key=lambda r: r["sentence_index"])
    return boundaries


def export_sentence_scores(config: AdapterConfig) -> Path:
    """Score each sentence of each document, one line per sentence."""
    if not config.corpus:
        raise AdapterError("export_sentence_scores needs --corpus")
    if not config.scores_out:
        raise AdapterError("export_sentence_scores needs --scores-out")
    records = read_corpus(config.corpus, config.corpus_format)
    boundaries = fetch_sentence_boundaries(config)
    scorer = make_scorer(config)

    rows: list[dict] = []
    for record in records:
        sentence_rows = boundaries.get(record.id, [])
        if not sentence_rows:
            raise AdapterError(
                f"pipeline segmentation returned no sentences for sample "
                f"{record.id!r}")
        texts = [record.document[r["start_char"]:r["end_char"]]
                 for r in sentence_rows]
        scores = scorer.score(texts)
        if len(scores) != len(sentence_rows):
            raise AdapterError(
                f"scorer returned {len(scores)} scores for "
                f"{len(sentence_rows)} sentences of sample {record.id!r}")
        for sentence_row, score in zip(sentence_rows, scores):
            if not math.isfinite(score):
                raise AdapterError(
                    f"non-finite score for sample {record.id!r} sentence "
                    f"{sentence_row['sentence_index']}")
            rows.append({
                "sample_id": record.id,
                "sentence_index": sentence_row["sentence_index"],
                "score": float(score),
            })
    target = Path(config.scores_out)
    _atomic_write_jsonl(target, rows)
    _write_meta(target, {"scorer": scorer.name, "corpus": str(config.corpus),
                         "scores": len(rows)})
    return target
