"""Extractive sentence scorers.

"lead" is the dependency-free default: earlier sentences score higher, which
is a strong extractive baseline for news and keeps tests hermetic.  "embed"
scores each sentence by cosine similarity to the document's mean sentence
embedding, approximating a neural extractive summarizer; it needs
sentence-transformers and downloadable weights.
"""

from __future__ import annotations

from .config import AdapterConfig, AdapterError


class LeadScorer:
    name = "lead"

    def score(self, sentences: list[str]) -> list[float]:
        return [1.0 / (1 + index) for index in range(len(sentences))]


class EmbeddingCentroidScorer:
    def __init__(self, device: str = "cpu",
                 model: str = "sentence-transformers/all-MiniLM-L6-v2",
                 batch_size: int = 16) -> None:
        try:
            from sentence_transformers import SentenceTransformer
        except ImportError as exc:
            raise AdapterError(
                "the embed scorer needs the 'sentence-transformers' package "
                f"(pip install elemsum-adapter[embed]): {exc}") from exc
        try:
            self._model = SentenceTransformer(model, device=device)
        except Exception as exc:
            raise AdapterError(
                f"could not load embedding model {model!r}: {exc}") from exc
        self._batch_size = batch_size
        self.name = f"embed-centroid:{model}"

    def score(self, sentences: list[str]) -> list[float]:
        if len(sentences) == 1:
            return [1.0]
        import numpy as np

        vectors = self._model.encode(sentences, batch_size=self._batch_size,
                                     normalize_embeddings=True)
        centroid = vectors.mean(axis=0)
        norm = np.linalg.norm(centroid)
        if norm == 0.0:
            return [0.0] * len(sentences)
        return [float(v @ centroid / norm) for v in vectors]


def make_scorer(config: AdapterConfig):
    if config.extractive_model == "lead":
        return LeadScorer()
    if config.extractive_model == "embed":
        return EmbeddingCentroidScorer(device=config.device,
                                       batch_size=config.batch_size)
    raise AdapterError(f"unknown extractive model {config.extractive_model!r}")
