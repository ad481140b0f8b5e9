"""Invertible emphasis and conclusion annotation.

Entity spans are wrapped in emphasis tokens (default "<" and ">") and the
conclusion sentence in "<conclusion>"/"</conclusion>".  Every insertion is
recorded as (original_offset, inserted_string), so stripping works through
the insertion map rather than by parsing; documents that already contain
literal angle brackets round-trip byte-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Sample, SentenceSpan
from .entities import EntitySpan

# Relative order of insertions that land on the same offset.  Closes come
# before opens so adjacent spans do not interleave, and entity tokens sit
# inside conclusion tokens.
_PRIO_ENTITY_CLOSE = 0
_PRIO_CONCLUSION_CLOSE = 1
_PRIO_CONCLUSION_OPEN = 2
_PRIO_ENTITY_OPEN = 3


@dataclass(frozen=True)
class AnnotationPlan:
    sample_id: str
    entity_spans: Sequence[EntitySpan] = ()
    conclusion_span: SentenceSpan | None = None
    open_token: str = "<"
    close_token: str = ">"
    conclusion_open: str = "<conclusion>"
    conclusion_close: str = "</conclusion>"


@dataclass(frozen=True)
class AnnotatedDocument:
    sample_id: str
    original: str
    annotated: str
    insertions: tuple[tuple[int, str], ...] = ()


def resolve_spans(
    spans: Iterable[EntitySpan], selected: Iterable[str]
) -> list[EntitySpan]:
    """Keep spans of selected types; resolve overlaps longer-then-earlier.

    Output is sorted by start offset and guaranteed non-overlapping.
    """
    wanted = set(selected)
    candidates = [s for s in spans if s.etype in wanted]
    candidates.sort(key=lambda s: (-(s.end_char - s.start_char), s.start_char,
                                   s.end_char, s.etype))
    kept: list[EntitySpan] = []
    for span in candidates:
        if all(span.end_char <= k.start_char or span.start_char >= k.end_char
               for k in kept):
            kept.append(span)
    kept.sort(key=lambda s: s.start_char)
    return kept


def apply_plan(sample: Sample, plan: AnnotationPlan) -> AnnotatedDocument:
    """Insert emphasis and conclusion tokens in one left-to-right pass.

    Entity spans must be resolved (sorted, non-overlapping, within bounds)
    and must not cross the conclusion boundary: a span is either fully inside
    or fully outside the conclusion sentence, otherwise ValueError.
    """
    if plan.sample_id != sample.id:
        raise ValueError(
            f"plan is for sample {plan.sample_id!r}, got {sample.id!r}")
    text = sample.document
    conclusion = plan.conclusion_span
    if conclusion is not None and not (
        0 <= conclusion.start_char < conclusion.end_char <= len(text)
    ):
        raise ValueError(
            f"conclusion span {conclusion.start_char}..{conclusion.end_char} "
            f"outside document of length {len(text)}")

    events: list[tuple[int, int, str]] = []
    if conclusion is not None:
        events.append((conclusion.start_char, _PRIO_CONCLUSION_OPEN, plan.conclusion_open))
        events.append((conclusion.end_char, _PRIO_CONCLUSION_CLOSE, plan.conclusion_close))
    prev_end = 0
    for span in plan.entity_spans:
        if not 0 <= span.start_char < span.end_char <= len(text):
            raise ValueError(
                f"entity span {span.start_char}..{span.end_char} outside "
                f"document of length {len(text)}")
        if span.start_char < prev_end:
            raise ValueError("entity spans must be sorted and non-overlapping")
        prev_end = span.end_char
        if conclusion is not None:
            overlaps = not (span.end_char <= conclusion.start_char
                            or span.start_char >= conclusion.end_char)
            inside = (conclusion.start_char <= span.start_char
                      and span.end_char <= conclusion.end_char)
            if overlaps and not inside:
                raise ValueError(
                    f"entity span {span.surface!r} at "
                    f"{span.start_char}..{span.end_char} crosses the conclusion "
                    f"boundary {conclusion.start_char}..{conclusion.end_char}")
        events.append((span.start_char, _PRIO_ENTITY_OPEN, plan.open_token))
        events.append((span.end_char, _PRIO_ENTITY_CLOSE, plan.close_token))

    events.sort(key=lambda e: (e[0], e[1]))
    pieces: list[str] = []
    cursor = 0
    insertions: list[tuple[int, str]] = []
    for offset, _prio, token in events:
        pieces.append(text[cursor:offset])
        pieces.append(token)
        insertions.append((offset, token))
        cursor = offset
    pieces.append(text[cursor:])
    return AnnotatedDocument(
        sample_id=sample.id,
        original=text,
        annotated="".join(pieces),
        insertions=tuple(insertions),
    )


def strip_annotations(doc: AnnotatedDocument) -> str:
    """Remove the recorded insertions from the annotated text.

    Reconstructs the original through the insertion map and verifies each
    recorded string actually sits at its mapped position (ValueError if the
    document was tampered with).
    """
    out: list[str] = []
    ai = 0  # cursor into annotated text
    oi = 0  # cursor into original text
    for offset, token in doc.insertions:
        gap = offset - oi
        if gap < 0:
            raise ValueError("insertion offsets are not sorted")
        out.append(doc.annotated[ai:ai + gap])
        ai += gap
        oi = offset
        if doc.annotated[ai:ai + len(token)] != token:
            raise ValueError(
                f"annotated text does not contain {token!r} at recorded offset {offset}")
        ai += len(token)
    out.append(doc.annotated[ai:])
    return "".join(out)
