"""Summary scoring: ROUGE-1, entity inclusion, length split, judge aggregation.

ROUGE-1 is clipped unigram overlap over casefolded word tokens (no stemming
or stopword removal unless configured).  Entity inclusion measures how many
reference-summary entities resurface in a model's summaries.  The length
split divides a corpus at the mean document token length and reports
per-bucket means.  Hallucination judging is delegated to an external LLM:
this module only emits the judge prompts and aggregates returned verdicts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Container, Literal, Sequence

from .corpus import Sample, tokenize
from .entities import EntitySpan, normalize_surface
from .jsonl import FormatError, read_jsonl, require, write_jsonl

MatchMode = Literal["surface", "spans"]

# Working definition of a hallucination embedded in the default judge prompt:
# any incorrect content, including misattribution, misinterpretation, and
# redundant content.
DEFAULT_JUDGE_TEMPLATE = (
    "Count the hallucinations in the summary below, where hallucination "
    "refers to any incorrect content, including misattribution, "
    "misinterpretation, and redundant content. Reply with an integer count "
    "and a brief rationale.\n\n"
    "Document:\n{document}\n\n"
    "Summary:\n{summary}\n"
)


@dataclass(frozen=True)
class CandidateSummary:
    sample_id: str
    system: str
    text: str


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class TypeInclusion:
    total: int
    included: int

    @property
    def ratio(self) -> float:
        return self.included / self.total if self.total else 0.0


@dataclass(frozen=True)
class InclusionReport:
    per_etype: dict[str, TypeInclusion]
    total: int
    included: int

    @property
    def overall_ratio(self) -> float:
        return self.included / self.total if self.total else 0.0


@dataclass(frozen=True)
class LengthBucket:
    count: int
    mean_doc_len: float
    mean_summary_len: float


@dataclass(frozen=True)
class LengthSplitReport:
    threshold: float
    short: LengthBucket
    long: LengthBucket


@dataclass(frozen=True)
class JudgeVerdict:
    sample_id: str
    system: str
    hallucination_count: int
    rationale: str = ""


@dataclass(frozen=True)
class JudgeReport:
    means: dict[str, float]
    table: tuple[JudgeVerdict, ...] = ()


def rouge1(
    candidate: str,
    reference: str,
    *,
    stemmer: Callable[[str], str] | None = None,
    stopwords: Container[str] | None = None,
) -> RougeScore:
    """Unigram overlap with clipped counts over casefolded tokens.

    f1 is computed as 2*overlap/(len(candidate)+len(reference)), which equals
    2pr/(p+r).  An empty candidate or reference yields all zeros.  Optional
    stemmer and stopword filters apply to both sides.
    """
    cand = _metric_tokens(candidate, stemmer, stopwords)
    ref = _metric_tokens(reference, stemmer, stopwords)
    if not cand or not ref:
        return RougeScore(0.0, 0.0, 0.0)
    overlap_counts = Counter(cand) & Counter(ref)
    overlap = sum(overlap_counts.values())
    return RougeScore(
        precision=overlap / len(cand),
        recall=overlap / len(ref),
        f1=2 * overlap / (len(cand) + len(ref)),
    )


def _metric_tokens(
    text: str,
    stemmer: Callable[[str], str] | None,
    stopwords: Container[str] | None,
) -> list[str]:
    words = [t.normalized for t in tokenize(text)]
    if stopwords:
        words = [w for w in words if w not in stopwords]
    if stemmer is not None:
        words = [stemmer(w) for w in words]
    return words


def occurs_token_bounded(surface: str, text: str) -> bool:
    """True when the normalized surface occurs in the normalized text at
    token boundaries (no alphanumeric character touching either end)."""
    needle = normalize_surface(surface)
    hay = normalize_surface(text)
    if not needle:
        return False
    start = 0
    while True:
        i = hay.find(needle, start)
        if i < 0:
            return False
        j = i + len(needle)
        before_ok = i == 0 or not hay[i - 1].isalnum()
        after_ok = j == len(hay) or not hay[j].isalnum()
        if before_ok and after_ok:
            return True
        start = i + 1


def entity_inclusion(
    ref_spans: Sequence[EntitySpan],
    candidates: Sequence[CandidateSummary],
    match: MatchMode = "surface",
    *,
    candidate_spans: Sequence[EntitySpan] | None = None,
    known_sample_ids: Container[str] | None = None,
) -> InclusionReport:
    """Fraction of reference-summary entities present in one system's summaries.

    ref_spans are summary-role entity spans of the references.  candidates
    must hold at most one summary per sample (split combined multi-system
    files per system before calling).  In surface mode an entity counts as
    included when its casefolded, whitespace-normalized surface occurs at
    token boundaries in the candidate; in spans mode it counts when a
    candidate-role span with the same normalized surface exists.
    """
    if known_sample_ids is None:
        known_sample_ids = {s.sample_id for s in ref_spans}
    by_sample: dict[str, CandidateSummary] = {}
    for cand in candidates:
        if cand.sample_id not in known_sample_ids:
            raise ValueError(
                f"candidate references unknown sample {cand.sample_id!r}")
        if cand.sample_id in by_sample:
            raise ValueError(
                f"multiple candidates for sample {cand.sample_id!r}; "
                "pass one system at a time")
        by_sample[cand.sample_id] = cand

    cand_surfaces: dict[str, set[str]] = {}
    if match == "spans":
        for span in candidate_spans or ():
            if span.role == "candidate":
                cand_surfaces.setdefault(span.sample_id, set()).add(
                    normalize_surface(span.surface))

    per_etype: dict[str, list[int]] = {}
    for span in ref_spans:
        if span.role != "summary":
            continue
        counts = per_etype.setdefault(span.etype, [0, 0])
        counts[0] += 1
        cand = by_sample.get(span.sample_id)
        if cand is None:
            continue
        if match == "surface":
            hit = occurs_token_bounded(span.surface, cand.text)
        elif match == "spans":
            hit = normalize_surface(span.surface) in cand_surfaces.get(span.sample_id, ())
        else:
            raise ValueError(f"unknown match mode {match!r}")
        if hit:
            counts[1] += 1

    report_types = {
        etype: TypeInclusion(total=c[0], included=c[1])
        for etype, c in sorted(per_etype.items())
    }
    return InclusionReport(
        per_etype=report_types,
        total=sum(c.total for c in report_types.values()),
        included=sum(c.included for c in report_types.values()),
    )


def length_split(
    samples: Sequence[Sample], candidates: Sequence[CandidateSummary]
) -> LengthSplitReport:
    """Divide the corpus at the mean document token length.

    Documents at or below the mean fall in the short bucket, strictly above
    in the long one.  Each sample needs exactly one candidate; per-bucket
    means cover document and candidate-summary token lengths.
    """
    if not samples:
        raise ValueError("length split needs a nonempty corpus")
    by_sample: dict[str, CandidateSummary] = {}
    for cand in candidates:
        if cand.sample_id in by_sample:
            raise ValueError(
                f"multiple candidates for sample {cand.sample_id!r}; "
                "pass one system at a time")
        by_sample[cand.sample_id] = cand
    missing = [s.id for s in samples if s.id not in by_sample]
    if missing:
        raise ValueError(f"samples without a candidate: {missing[:5]}")

    doc_lens = {s.id: len(tokenize(s.document)) for s in samples}
    threshold = sum(doc_lens.values()) / len(samples)
    buckets: dict[str, list[Sample]] = {"short": [], "long": []}
    for sample in samples:
        key = "short" if doc_lens[sample.id] <= threshold else "long"
        buckets[key].append(sample)

    def _bucket(members: list[Sample]) -> LengthBucket:
        if not members:
            return LengthBucket(0, 0.0, 0.0)
        docs = [doc_lens[s.id] for s in members]
        sums = [len(tokenize(by_sample[s.id].text)) for s in members]
        return LengthBucket(
            count=len(members),
            mean_doc_len=sum(docs) / len(members),
            mean_summary_len=sum(sums) / len(members),
        )

    return LengthSplitReport(
        threshold=threshold,
        short=_bucket(buckets["short"]),
        long=_bucket(buckets["long"]),
    )


def emit_judge_prompts(
    samples: Sequence[Sample],
    candidates: Sequence[CandidateSummary],
    path: str | Path,
    template: str = DEFAULT_JUDGE_TEMPLATE,
) -> int:
    """Write {sample_id, system, prompt} JSONL, one line per candidate.

    Prompts embed the source document and candidate summary into the
    template; lines are ordered by (system, sample_id).
    """
    docs = {s.id: s.document for s in samples}
    rows = []
    for cand in sorted(candidates, key=lambda c: (c.system, c.sample_id)):
        if cand.sample_id not in docs:
            raise ValueError(
                f"candidate references unknown sample {cand.sample_id!r}")
        rows.append({
            "sample_id": cand.sample_id,
            "system": cand.system,
            "prompt": template.format(document=docs[cand.sample_id],
                                      summary=cand.text),
        })
    return write_jsonl(path, rows)


def aggregate_verdicts(verdicts: Sequence[JudgeVerdict]) -> JudgeReport:
    """Mean hallucination count per system, plus the per-sample table.

    Duplicate (sample, system) verdicts raise ValueError.
    """
    seen: set[tuple[str, str]] = set()
    counts: dict[str, list[int]] = {}
    for verdict in verdicts:
        key = (verdict.sample_id, verdict.system)
        if key in seen:
            raise ValueError(f"duplicate verdict for {key}")
        seen.add(key)
        if verdict.hallucination_count < 0:
            raise ValueError(
                f"negative hallucination count for {key}: "
                f"{verdict.hallucination_count}")
        counts.setdefault(verdict.system, []).append(verdict.hallucination_count)
    means = {
        system: sum(values) / len(values)
        for system, values in sorted(counts.items())
    }
    table = tuple(sorted(verdicts, key=lambda v: (v.system, v.sample_id)))
    return JudgeReport(means=means, table=table)


def load_candidates(path: str | Path) -> list[CandidateSummary]:
    """Parse candidate JSONL {sample_id, system, text}."""
    out = []
    for lineno, obj in read_jsonl(path):
        out.append(CandidateSummary(
            sample_id=require(obj, "sample_id", "str", path=path, line=lineno),
            system=require(obj, "system", "str", path=path, line=lineno),
            text=require(obj, "text", "str", path=path, line=lineno),
        ))
    return out


def load_verdicts(path: str | Path) -> list[JudgeVerdict]:
    """Parse verdict JSONL {sample_id, system, hallucination_count, rationale}."""
    out = []
    for lineno, obj in read_jsonl(path):
        count = require(obj, "hallucination_count", "int", path=path, line=lineno)
        if count < 0:
            raise FormatError("hallucination_count must be >= 0",
                              path=path, line=lineno, field="hallucination_count")
        out.append(JudgeVerdict(
            sample_id=require(obj, "sample_id", "str", path=path, line=lineno),
            system=require(obj, "system", "str", path=path, line=lineno),
            hallucination_count=count,
            rationale=obj.get("rationale", ""),
        ))
    return out
