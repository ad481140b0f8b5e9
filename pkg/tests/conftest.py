"""Shared fixture builders for the test suite."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

# Per-entity-type (dialogue_count, summary_count) presence counts out of 500
# validation samples, ordered by descending summary/dialogue ratio.
TYPE_COUNTS = [
    ("PERSON", 186, 156),
    ("GPE", 81, 39),
    ("LANGUAGE", 19, 9),
    ("ORG", 56, 23),
    ("FAC", 20, 7),
    ("NORP", 42, 14),
    ("DATE", 183, 57),
    ("MONEY", 55, 10),
    ("ORDINAL", 50, 9),
    ("CARDINAL", 145, 25),
    ("TIME", 112, 16),
    ("LOC", 14, 1),
]

SELECTED_TYPES = ["PERSON", "GPE", "LANGUAGE", "ORG", "FAC", "NORP", "DATE"]

CORPUS_SIZE = 500


def write_jsonl(path: Path, rows: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    return path


def build_ratio_fixture(directory: Path) -> tuple[Path, Path]:
    """Write a 500-sample corpus plus spans realizing TYPE_COUNTS exactly.

    Sample i's document contains one marker word for every type whose
    dialogue count exceeds i, and likewise for the summary; offsets are exact
    so the spans validate against the texts.
    """
    corpus_rows = []
    span_rows = []
    for i in range(CORPUS_SIZE):
        sid = f"s{i:03d}"
        document = "hello."
        summary = "ok."
        for etype, doc_count, sum_count in TYPE_COUNTS:
            word = etype.lower()
            if i < doc_count:
                document += " " + word
                span_rows.append({
                    "sample_id": sid, "role": "document",
                    "start_char": len(document) - len(word),
                    "end_char": len(document),
                    "etype": etype, "surface": word, "source": "fixture",
                })
            if i < sum_count:
                summary += " " + word
                span_rows.append({
                    "sample_id": sid, "role": "summary",
                    "start_char": len(summary) - len(word),
                    "end_char": len(summary),
                    "etype": etype, "surface": word, "source": "fixture",
                })
        corpus_rows.append({"id": sid, "document": document, "summary": summary})
    corpus_path = write_jsonl(directory / "ratio_corpus.jsonl", corpus_rows)
    spans_path = write_jsonl(directory / "ratio_spans.jsonl", span_rows)
    return corpus_path, spans_path


@pytest.fixture
def ratio_fixture(tmp_path):
    return build_ratio_fixture(tmp_path)


TINY_CORPUS = [
    {
        "id": "d1",
        "document": "#Tom#: Alice flew to Paris on Monday.\n#Ann#: She loved it there.",
        "summary": "Alice enjoyed her Monday trip to Paris.",
        "topic": "travel",
    },
    {
        "id": "d2",
        "document": "#Bob#: The meeting with IBM is tomorrow.\n#Eve#: Bring the report. It matters.",
        "summary": "Bob reminds Eve about the IBM meeting.",
        "topic": "work",
    },
    {
        "id": "d3",
        "document": "#Sue#: Did you watch the game? It was great.\n#Max#: Spain won again!",
        "summary": "Sue and Max discuss Spain's win.",
        "topic": "sports",
    },
]


def _find_spans(rows: list[dict], words: dict[str, str]) -> list[dict]:
    spans = []
    for row in rows:
        for role, text in (("document", row["document"]), ("summary", row["summary"])):
            for word, etype in words.items():
                start = 0
                while True:
                    i = text.find(word, start)
                    if i < 0:
                        break
                    spans.append({
                        "sample_id": row["id"], "role": role,
                        "start_char": i, "end_char": i + len(word),
                        "etype": etype, "surface": word, "source": "fixture",
                    })
                    start = i + len(word)
    return spans


TINY_WORDS = {
    "Alice": "PERSON", "Paris": "GPE", "Monday": "DATE", "IBM": "ORG",
    "Spain": "GPE", "Bob": "PERSON", "Eve": "PERSON",
}


def build_tiny_fixture(directory: Path) -> tuple[Path, Path]:
    """Three dialogue samples with hand-verifiable entity spans."""
    corpus_path = write_jsonl(directory / "tiny_corpus.jsonl", TINY_CORPUS)
    spans_path = write_jsonl(directory / "tiny_spans.jsonl",
                             _find_spans(TINY_CORPUS, TINY_WORDS))
    return corpus_path, spans_path


@pytest.fixture
def tiny_fixture(tmp_path):
    return build_tiny_fixture(tmp_path)
