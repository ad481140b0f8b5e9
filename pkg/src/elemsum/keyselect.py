"""Per-entity-type dialogue/summary presence counts and key-type selection.

A sample counts once per (etype, role) no matter how many spans it holds;
the ratio for a type is the number of samples whose summary contains it
divided by the number of samples whose document contains it.  Types whose
ratio exceeds the selection threshold are the "key" entity types.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus import Sample
from .entities import EntitySpan


@dataclass(frozen=True)
class EntityTypeStats:
    etype: str
    dialogue_count: int
    summary_count: int
    ratio: float


@dataclass(frozen=True)
class SelectionConfig:
    threshold: float = 0.30
    explicit_types: Sequence[str] | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must be in [0, 1], got {self.threshold}")


def compute_type_stats(
    samples: Sequence[Sample], spans: Iterable[EntitySpan]
) -> list[EntityTypeStats]:
    """Aggregate per-type presence counts over a corpus.

    Returns one row per etype present in at least one document span, sorted
    by ratio descending (etype as tiebreaker).  Candidate-role spans are
    ignored.  Spans referencing an id outside the corpus raise ValueError.
    """
    known = {s.id for s in samples}
    doc_presence: dict[str, set[str]] = {}
    sum_presence: dict[str, set[str]] = {}
    for span in spans:
        if span.sample_id not in known:
            raise ValueError(f"span references unknown sample id {span.sample_id!r}")
        if span.role == "document":
            doc_presence.setdefault(span.etype, set()).add(span.sample_id)
        elif span.role == "summary":
            sum_presence.setdefault(span.etype, set()).add(span.sample_id)
    rows = [
        EntityTypeStats(
            etype=etype,
            dialogue_count=len(ids),
            summary_count=len(sum_presence.get(etype, ())),
            ratio=len(sum_presence.get(etype, ())) / len(ids),
        )
        for etype, ids in doc_presence.items()
    ]
    rows.sort(key=lambda r: (-r.ratio, r.etype))
    return rows


def select_types(
    stats: Sequence[EntityTypeStats], config: SelectionConfig | None = None
) -> list[str]:
    """Pick key entity types: ratio strictly above the threshold, ratio-descending.

    An explicit_types list in the config short-circuits the threshold rule and
    is returned verbatim.
    """
    config = config or SelectionConfig()
    if config.explicit_types is not None:
        return list(config.explicit_types)
    chosen = [
        row for row in stats
        if row.dialogue_count > 0 and row.ratio > config.threshold
    ]
    chosen.sort(key=lambda r: (-r.ratio, r.etype))
    return [row.etype for row in chosen]


def stats_as_rows(stats: Sequence[EntityTypeStats]) -> list[dict]:
    """Report rows with ratios rounded to 3 decimal places (round-half-even)."""
    return [
        {
            "etype": row.etype,
            "ratio": round(row.ratio, 3),
            "dialogue_count": row.dialogue_count,
            "summary_count": row.summary_count,
        }
        for row in stats
    ]


def format_stats_tsv(stats: Sequence[EntityTypeStats]) -> str:
    lines = ["etype\tratio\tdialogue\tsummary"]
    for row in stats:
        lines.append(
            f"{row.etype}\t{row.ratio:.3f}\t{row.dialogue_count}\t{row.summary_count}"
        )
    return "\n".join(lines) + "\n"
