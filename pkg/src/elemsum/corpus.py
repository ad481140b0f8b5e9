"""Corpus loading, sentence segmentation, and tokenization.

All offsets throughout the package are 0-based character offsets counting
Unicode scalar values (never bytes), with inclusive start and exclusive end.
Every downstream module (span validation, annotation, metrics) relies on the
segmentation and tokenization defined here, so both are deterministic and
dependency-free.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from .jsonl import FormatError, read_jsonl, require

DomainTag = Literal["dialogue", "news"]
CorpusFormat = Literal["dialogsum_jsonl", "cnndm_jsonl", "generic_jsonl"]

CORPUS_FORMATS = ("dialogsum_jsonl", "cnndm_jsonl", "generic_jsonl")

_SENTENCE_TERMINATORS = ".?!"

# Maximal alphanumeric runs (Unicode-aware, underscore excluded), with
# apostrophes kept when they sit between alphanumerics ("don't").
_TOKEN_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*")


@dataclass(frozen=True)
class Sample:
    """One corpus record: source document plus optional reference summary."""

    id: str
    document: str
    summary: str = ""
    topic: str | None = None
    domain_tag: DomainTag = "dialogue"


@dataclass(frozen=True)
class SentenceSpan:
    start_char: int
    end_char: int
    index: int


@dataclass(frozen=True)
class Token:
    surface: str
    start_char: int
    end_char: int
    normalized: str


def load_corpus(path: str | Path, format: CorpusFormat) -> list[Sample]:
    """Load a JSONL corpus, mapping format-specific field names onto Sample.

    Field maps:
      dialogsum_jsonl  fname -> id, dialogue -> document, summary -> summary,
                       topic -> topic; domain "dialogue"
      cnndm_jsonl      id -> id, article -> document, highlights -> summary;
                       domain "news"
      generic_jsonl    id, document, summary, topic verbatim; optional
                       "domain" field (dialogue|news), default "dialogue"

    Raises FormatError naming the line for malformed JSON, the field for a
    missing required field, and the id for duplicates.
    """
    if format not in CORPUS_FORMATS:
        raise ValueError(f"unknown corpus format {format!r}")
    samples: list[Sample] = []
    seen: set[str] = set()
    for lineno, obj in read_jsonl(path):
        if format == "dialogsum_jsonl":
            sid = require(obj, "fname", "str", path=path, line=lineno)
            document = require(obj, "dialogue", "str", path=path, line=lineno)
            summary = obj.get("summary", "")
            topic = obj.get("topic")
            domain: DomainTag = "dialogue"
        elif format == "cnndm_jsonl":
            sid = require(obj, "id", "str", path=path, line=lineno)
            document = require(obj, "article", "str", path=path, line=lineno)
            summary = obj.get("highlights", "")
            topic = None
            domain = "news"
        else:
            sid = require(obj, "id", "str", path=path, line=lineno)
            document = require(obj, "document", "str", path=path, line=lineno)
            summary = obj.get("summary", "")
            topic = obj.get("topic")
            domain = obj.get("domain", "dialogue")
            if domain not in ("dialogue", "news"):
                raise FormatError(
                    f"domain must be 'dialogue' or 'news', got {domain!r}",
                    path=path, line=lineno, field="domain",
                )
        if not sid:
            raise FormatError("id must be nonempty", path=path, line=lineno, field="id")
        if not document:
            raise FormatError(
                "document must be nonempty", path=path, line=lineno, field="document"
            )
        if not isinstance(summary, str):
            raise FormatError("expected a string", path=path, line=lineno, field="summary")
        if topic is not None and not isinstance(topic, str):
            raise FormatError("expected a string", path=path, line=lineno, field="topic")
        if sid in seen:
            raise FormatError(f"duplicate id {sid!r}", path=path, line=lineno, field="id")
        seen.add(sid)
        samples.append(Sample(id=sid, document=document, summary=summary,
                              topic=topic, domain_tag=domain))
    return samples


def segment_sentences(text: str, domain_tag: DomainTag = "dialogue") -> list[SentenceSpan]:
    """Split text into sentence spans with exact character offsets.

    Dialogue text is first split into newline-delimited speaker turns, then
    each turn is split on runs of ``.?!`` followed by whitespace (or turn
    end).  News text skips the turn split and applies the punctuation rule to
    the whole string.  Spans exclude surrounding whitespace but include the
    terminating punctuation; text with no terminator yields a single span.
    """
    bounds: list[tuple[int, int]] = []
    if domain_tag == "dialogue":
        pos = 0
        for line in text.split("\n"):
            _scan_chunk(text, pos, pos + len(line), bounds)
            pos += len(line) + 1
    else:
        _scan_chunk(text, 0, len(text), bounds)
    return [SentenceSpan(start, end, i) for i, (start, end) in enumerate(bounds)]


def _scan_chunk(text: str, lo: int, hi: int, out: list[tuple[int, int]]) -> None:
    i = lo
    start: int | None = None
    while i < hi:
        ch = text[i]
        if start is None:
            if not ch.isspace():
                start = i
            i += 1
            continue
        if ch in _SENTENCE_TERMINATORS:
            j = i
            while j + 1 < hi and text[j + 1] in _SENTENCE_TERMINATORS:
                j += 1
            nxt = j + 1
            if nxt >= hi or text[nxt].isspace():
                out.append((start, j + 1))
                start = None
            i = nxt
            continue
        i += 1
    if start is not None:
        end = hi
        while end > start and text[end - 1].isspace():
            end -= 1
        if end > start:
            out.append((start, end))


def tokenize(text: str) -> list[Token]:
    """Return word tokens with exact offsets; normalized is the casefold."""
    return [
        Token(m.group(), m.start(), m.end(), m.group().casefold())
        for m in _TOKEN_RE.finditer(text)
    ]


def token_count(text: str) -> int:
    return sum(1 for _ in _TOKEN_RE.finditer(text))
