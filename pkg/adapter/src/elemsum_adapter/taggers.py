"""Entity taggers producing character-exact (start, end, etype) triples.

The fixture tagger serves tests and offline runs: a JSON gazetteer matched
case-insensitively at word boundaries, longest surface first.  The flair
tagger wraps the pretrained OntoNotes NER model when the package is
installed; either way every emitted offset is re-checked against the text
before a span leaves this process.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from .config import AdapterConfig, AdapterError

_WORD_RE = re.compile(r"[^\W_]+(?:['’][^\W_]+)*")


class FixtureGazetteerTagger:
    """Deterministic stand-in for a statistical tagger."""

    name = "fixture-gazetteer"

    def __init__(self, gazetteer_path: str | Path) -> None:
        with open(gazetteer_path, encoding="utf-8") as fh:
            entries = json.load(fh)
        if not isinstance(entries, dict) or not all(
                isinstance(k, str) and isinstance(v, str) for k, v in entries.items()):
            raise AdapterError(
                f"gazetteer {gazetteer_path} must map surface strings to types")
        self.entries = {k.casefold(): v for k, v in entries.items()}

    def tag(self, text: str) -> list[tuple[int, int, str]]:
        matches: list[tuple[int, int, str]] = []
        folded = text.casefold()
        for surface, etype in self.entries.items():
            start = 0
            while True:
                i = folded.find(surface, start)
                if i < 0:
                    break
                j = i + len(surface)
                before_ok = i == 0 or not folded[i - 1].isalnum()
                after_ok = j == len(folded) or not folded[j].isalnum()
                if before_ok and after_ok:
                    matches.append((i, j, etype))
                start = i + 1
        # longest-then-earliest, non-overlapping
        matches.sort(key=lambda m: (-(m[1] - m[0]), m[0]))
        kept: list[tuple[int, int, str]] = []
        for m in matches:
            if all(m[1] <= k[0] or m[0] >= k[1] for k in kept):
                kept.append(m)
        kept.sort(key=lambda m: m[0])
        return kept


class FlairTagger:
    """OntoNotes NER through flair; optional dependency."""

    def __init__(self, device: str = "cpu",
                 model: str = "flair/ner-english-ontonotes-large") -> None:
        try:
            import flair
            from flair.data import Sentence
            from flair.models import SequenceTagger
        except ImportError as exc:
            raise AdapterError(
                "the flair tagger needs the 'flair' package "
                f"(pip install elemsum-adapter[ner]): {exc}") from exc
        self._sentence_cls = Sentence
        try:
            self._tagger = SequenceTagger.load(model)
        except Exception as exc:
            raise AdapterError(f"could not load NER model {model!r}: {exc}") from exc
        self.name = f"flair-{flair.__version__}"

    def tag(self, text: str) -> list[tuple[int, int, str]]:
        sentence = self._sentence_cls(text, use_tokenizer=True)
        self._tagger.predict(sentence)
        return [
            (span.start_position, span.end_position, span.tag)
            for span in sentence.get_spans("ner")
        ]


def make_tagger(config: AdapterConfig):
    if config.tagger == "fixture":
        if not config.gazetteer:
            raise AdapterError("the fixture tagger needs --gazetteer")
        return FixtureGazetteerTagger(config.gazetteer)
    if config.tagger == "flair":
        return FlairTagger(device=config.device)
    raise AdapterError(f"unknown tagger {config.tagger!r}")
