"""Top-1 conclusion sentence selection.

The built-in scorer ranks sentences by term-frequency cosine centrality: the
score of a sentence is the sum of its cosine similarities (over casefolded
token counts) to every other sentence.  Scores from an external extractive
model can be supplied instead through the JSONL schema
{sample_id, sentence_index, score}.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Container, Literal, Sequence

from .corpus import Sample, segment_sentences, tokenize
from .jsonl import FormatError, read_jsonl, require

ScoreMethod = Literal["centrality", "external"]


@dataclass(frozen=True)
class SentenceScore:
    sample_id: str
    sentence_index: int
    score: float


def _tf_vector(text: str, stopwords: Container[str] | None) -> Counter:
    counts = Counter(t.normalized for t in tokenize(text))
    if stopwords:
        counts = Counter({w: c for w, c in counts.items() if w not in stopwords})
    return counts


def _cosine(u: Counter, v: Counter) -> float:
    if not u or not v:
        return 0.0
    dot = sum(c * v[w] for w, c in u.items())
    nu = math.sqrt(sum(c * c for c in u.values()))
    nv = math.sqrt(sum(c * c for c in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return dot / (nu * nv)


def score_sentences(
    sample: Sample,
    method: ScoreMethod = "centrality",
    *,
    external: Sequence[SentenceScore] | None = None,
    stopwords: Container[str] | None = None,
) -> list[SentenceScore]:
    """Score every sentence of the sample's document, ordered by index.

    centrality: score(i) = sum over j != i of cosine(tf_i, tf_j); a
    single-sentence document scores 1.0.  external: take scores for this
    sample from `external` (as loaded by load_external_scores), which must
    cover each sentence index exactly once.
    """
    sentences = segment_sentences(sample.document, sample.domain_tag)
    if not sentences:
        raise ValueError(f"sample {sample.id!r} has no sentences")
    if method == "centrality":
        if len(sentences) == 1:
            return [SentenceScore(sample.id, 0, 1.0)]
        vectors = [
            _tf_vector(sample.document[s.start_char:s.end_char], stopwords)
            for s in sentences
        ]
        scores = []
        for i in range(len(vectors)):
            total = sum(
                _cosine(vectors[i], vectors[j])
                for j in range(len(vectors)) if j != i
            )
            scores.append(SentenceScore(sample.id, i, total))
        return scores
    if method == "external":
        if external is None:
            raise ValueError("external method requires loaded scores")
        mine = {s.sentence_index: s for s in external if s.sample_id == sample.id}
        missing = [i for i in range(len(sentences)) if i not in mine]
        extra = [i for i in mine if not 0 <= i < len(sentences)]
        if missing or extra or len(mine) != len(sentences):
            raise ValueError(
                f"external scores for sample {sample.id!r} do not match its "
                f"{len(sentences)} sentences (missing {missing}, out of range {extra})"
            )
        return [mine[i] for i in range(len(sentences))]
    raise ValueError(f"unknown scoring method {method!r}")


def pick_conclusion(scores: Sequence[SentenceScore]) -> int:
    """Index of the maximal score; ties break toward the smallest index."""
    if not scores:
        raise ValueError("cannot pick a conclusion from empty scores")
    best = max(scores, key=lambda s: (s.score, -s.sentence_index))
    return best.sentence_index


def load_external_scores(path: str | Path) -> list[SentenceScore]:
    """Parse {sample_id, sentence_index, score} JSONL; scores must be finite."""
    scores: list[SentenceScore] = []
    for lineno, obj in read_jsonl(path):
        sample_id = require(obj, "sample_id", "str", path=path, line=lineno)
        index = require(obj, "sentence_index", "int", path=path, line=lineno)
        if index < 0:
            raise FormatError("sentence_index must be >= 0", path=path,
                              line=lineno, field="sentence_index")
        score = require(obj, "score", "number", path=path, line=lineno)
        if not math.isfinite(score):
            raise FormatError(f"score must be finite, got {score!r}", path=path,
                              line=lineno, field="score")
        scores.append(SentenceScore(sample_id, index, float(score)))
    return scores
