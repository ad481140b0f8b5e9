"""Entity-span interchange format, span validation, and a gazetteer tagger.

The JSONL span schema defined here is the contract between this package and
any external tagger: one object per line with fields sample_id, role,
start_char, end_char, etype, surface, source.  Offsets index into the text of
the named role (document or summary of the sample; candidate for model
output).  The gazetteer tagger exists so the pipeline and its tests run
without any ML runtime.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal, Mapping

from .corpus import Sample, tokenize
from .jsonl import FormatError, read_jsonl, require, write_jsonl

Role = Literal["document", "summary", "candidate"]

ROLES = ("document", "summary", "candidate")

# OntoNotes 5 label inventory; other labels are accepted but flagged as
# warnings by validate_spans.
ONTONOTES_TYPES = frozenset({
    "PERSON", "NORP", "FAC", "ORG", "GPE", "LOC", "PRODUCT", "EVENT",
    "WORK_OF_ART", "LAW", "LANGUAGE", "DATE", "TIME", "PERCENT", "MONEY",
    "QUANTITY", "ORDINAL", "CARDINAL",
})


@dataclass(frozen=True)
class EntitySpan:
    sample_id: str
    role: Role
    start_char: int
    end_char: int
    etype: str
    surface: str
    source: str = "unknown"


@dataclass(frozen=True)
class SpanProblem:
    span: EntitySpan
    kind: str  # "bounds" or "surface"
    detail: str


@dataclass
class ValidationReport:
    """Result of checking spans against a sample's texts.

    problems hold spans whose offsets overflow or whose surface disagrees
    with the text; an empty problems list means the spans are valid.
    warnings flag non-fatal oddities (labels outside the OntoNotes
    inventory, candidate spans with no text to check against).
    """

    sample_id: str
    problems: list[SpanProblem] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def _check_etype(etype: object) -> bool:
    return (
        isinstance(etype, str)
        and bool(etype)
        and etype.isascii()
        and etype == etype.upper()
    )


def load_spans(path: str | Path) -> list[EntitySpan]:
    """Parse a span JSONL file, preserving order.

    Schema violations raise FormatError with the line number and field.
    """
    spans: list[EntitySpan] = []
    for lineno, obj in read_jsonl(path):
        sample_id = require(obj, "sample_id", "str", path=path, line=lineno)
        role = require(obj, "role", "str", path=path, line=lineno)
        if role not in ROLES:
            raise FormatError(
                f"role must be one of {ROLES}, got {role!r}",
                path=path, line=lineno, field="role",
            )
        start = require(obj, "start_char", "int", path=path, line=lineno)
        end = require(obj, "end_char", "int", path=path, line=lineno)
        if start < 0:
            raise FormatError("start_char must be >= 0", path=path, line=lineno,
                              field="start_char")
        if start >= end:
            raise FormatError(
                f"start_char {start} must be < end_char {end}",
                path=path, line=lineno, field="end_char",
            )
        etype = require(obj, "etype", "str", path=path, line=lineno)
        if not _check_etype(etype):
            raise FormatError(
                f"etype must be nonempty uppercase ASCII, got {etype!r}",
                path=path, line=lineno, field="etype",
            )
        surface = require(obj, "surface", "str", path=path, line=lineno)
        source = require(obj, "source", "str", path=path, line=lineno)
        spans.append(EntitySpan(sample_id, role, start, end, etype, surface, source))
    return spans


def save_spans(spans: Iterable[EntitySpan], path: str | Path) -> int:
    return write_jsonl(path, (
        {
            "sample_id": s.sample_id,
            "role": s.role,
            "start_char": s.start_char,
            "end_char": s.end_char,
            "etype": s.etype,
            "surface": s.surface,
            "source": s.source,
        }
        for s in spans
    ))


def validate_spans(
    sample: Sample,
    spans: Iterable[EntitySpan],
    candidate_text: str | None = None,
) -> ValidationReport:
    """Check every span's bounds and surface against the sample's texts.

    Spans must all reference sample.id (ValueError otherwise).  Candidate
    spans are checked against candidate_text when given and produce a warning
    when not.
    """
    report = ValidationReport(sample_id=sample.id)
    for span in spans:
        if span.sample_id != sample.id:
            raise ValueError(
                f"span references sample {span.sample_id!r}, expected {sample.id!r}"
            )
        if not _check_etype(span.etype):
            report.problems.append(SpanProblem(
                span, "surface", f"etype {span.etype!r} is not uppercase ASCII"))
            continue
        if span.etype not in ONTONOTES_TYPES:
            report.warnings.append(
                f"etype {span.etype!r} is outside the OntoNotes inventory")
        if span.role == "document":
            text = sample.document
        elif span.role == "summary":
            text = sample.summary
        else:
            if candidate_text is None:
                report.warnings.append(
                    f"candidate span {span.surface!r} at "
                    f"{span.start_char}..{span.end_char} not checked (no candidate text)")
                continue
            text = candidate_text
        if span.start_char < 0 or span.end_char > len(text) or span.start_char >= span.end_char:
            report.problems.append(SpanProblem(
                span, "bounds",
                f"span {span.start_char}..{span.end_char} outside text of "
                f"length {len(text)}"))
            continue
        actual = text[span.start_char:span.end_char]
        if actual != span.surface:
            report.problems.append(SpanProblem(
                span, "surface",
                f"surface {span.surface!r} != text slice {actual!r}"))
    return report


def normalize_surface(surface: str) -> str:
    """Casefold and collapse internal whitespace runs to single spaces."""
    return " ".join(surface.casefold().split())


class Gazetteer:
    """Normalized surface string -> entity type map for deterministic tagging."""

    def __init__(self, entries: Mapping[str, str]) -> None:
        self.entries: dict[str, str] = {}
        max_tokens = 1
        for surface, etype in entries.items():
            key = normalize_surface(surface)
            if not key:
                raise ValueError(f"gazetteer surface {surface!r} normalizes to empty")
            if not _check_etype(etype):
                raise ValueError(f"invalid etype {etype!r} for surface {surface!r}")
            self.entries[key] = etype
            max_tokens = max(max_tokens, len(tokenize(key)))
        self._max_tokens = max_tokens


def gazetteer_tag(
    text: str,
    gazetteer: Gazetteer,
    *,
    sample_id: str = "",
    role: Role = "document",
    source: str = "gazetteer",
) -> list[EntitySpan]:
    """Tag text with gazetteer entries.

    Matching is case-insensitive, whole-token, left to right, preferring the
    longest entry at each position; output spans never overlap and are sorted
    by start offset.
    """
    tokens = tokenize(text)
    spans: list[EntitySpan] = []
    i = 0
    while i < len(tokens):
        matched = None
        hi = min(len(tokens), i + gazetteer._max_tokens)
        for j in range(hi - 1, i - 1, -1):
            start, end = tokens[i].start_char, tokens[j].end_char
            if normalize_surface(text[start:end]) in gazetteer.entries:
                matched = (start, end, gazetteer.entries[normalize_surface(text[start:end])], j)
                break
        if matched is None:
            i += 1
            continue
        start, end, etype, j = matched
        spans.append(EntitySpan(sample_id, role, start, end, etype, text[start:end], source))
        i = j + 1
    return spans
