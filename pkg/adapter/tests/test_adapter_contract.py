"""Contract tests: everything the adapter emits must be accepted, without
warnings, by the pipeline package's own loaders and validators."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from elemsum.conclusion import load_external_scores, score_sentences
from elemsum.corpus import load_corpus, segment_sentences
from elemsum.entities import load_spans, validate_spans
from elemsum.prompts import emit_finetune_config

pytest.importorskip("elemsum_adapter", reason="adapter package not installed")

from elemsum_adapter import (AdapterConfig, AdapterError,
                             export_sentence_scores, export_spans,
                             resolve_finetune_config, run_finetune)

FIVE_SAMPLES = [
    {"id": "a1", "document": "#Ann#: Alice met Bob in Paris.\n#Joe#: On Monday?",
     "summary": "Alice met Bob in Paris on Monday."},
    {"id": "a2", "document": "#Sue#: IBM hired Alice. She starts Friday.",
     "summary": "IBM hired Alice."},
    {"id": "a3", "document": "#Max#: The Paris office opened. Bob runs it.",
     "summary": "Bob runs the new Paris office."},
    {"id": "a4", "document": "#Eve#: Nothing notable happened today.",
     "summary": "An uneventful day."},
    {"id": "a5", "document": "#Tom#: Monday we fly to Paris with IBM.\n#Ann#: Great.",
     "summary": "A Monday flight to Paris with IBM."},
]

GAZETTEER = {"Alice": "PERSON", "Bob": "PERSON", "Paris": "GPE",
             "Monday": "DATE", "Friday": "DATE", "IBM": "ORG"}


@pytest.fixture
def corpus_path(tmp_path) -> Path:
    path = tmp_path / "corpus.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for row in FIVE_SAMPLES:
            fh.write(json.dumps(row) + "\n")
    return path


@pytest.fixture
def gazetteer_path(tmp_path) -> Path:
    path = tmp_path / "gazetteer.json"
    path.write_text(json.dumps(GAZETTEER), encoding="utf-8")
    return path


class TestExportSpansContract:
    def test_spans_validate_with_zero_warnings(self, corpus_path, gazetteer_path,
                                               tmp_path):
        config = AdapterConfig(corpus=str(corpus_path), tagger="fixture",
                               gazetteer=str(gazetteer_path),
                               spans_out=str(tmp_path / "spans.jsonl"))
        target = export_spans(config)
        spans = load_spans(target)
        assert spans, "fixture corpus must produce spans"
        samples = load_corpus(corpus_path, "generic_jsonl")
        for sample in samples:
            mine = [s for s in spans if s.sample_id == sample.id]
            report = validate_spans(sample, mine)
            assert report.ok, report.problems
            assert report.warnings == []

    def test_person_span_found_in_obvious_fixture(self, corpus_path,
                                                  gazetteer_path, tmp_path):
        config = AdapterConfig(corpus=str(corpus_path), tagger="fixture",
                               gazetteer=str(gazetteer_path),
                               spans_out=str(tmp_path / "spans.jsonl"))
        spans = load_spans(export_spans(config))
        a1_doc = [s for s in spans if s.sample_id == "a1" and s.role == "document"]
        assert any(s.etype == "PERSON" for s in a1_doc)
        roles = {s.role for s in spans}
        assert roles == {"document", "summary"}

    def test_empty_corpus_yields_empty_file(self, tmp_path, gazetteer_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        config = AdapterConfig(corpus=str(empty), tagger="fixture",
                               gazetteer=str(gazetteer_path),
                               spans_out=str(tmp_path / "spans.jsonl"))
        target = export_spans(config)
        assert target.read_text(encoding="utf-8") == ""

    def test_corrupted_corpus_leaves_no_partial_file(self, tmp_path,
                                                     gazetteer_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"id": "a", "document": "x."}\nnot json\n')
        out = tmp_path / "spans.jsonl"
        config = AdapterConfig(corpus=str(bad), tagger="fixture",
                               gazetteer=str(gazetteer_path),
                               spans_out=str(out))
        with pytest.raises(AdapterError, match="line 2"):
            export_spans(config)
        assert not out.exists()
        assert not out.with_suffix(".jsonl.tmp").exists()

    def test_metadata_records_tagger(self, corpus_path, gazetteer_path, tmp_path):
        out = tmp_path / "spans.jsonl"
        config = AdapterConfig(corpus=str(corpus_path), tagger="fixture",
                               gazetteer=str(gazetteer_path), spans_out=str(out))
        export_spans(config)
        meta = json.loads((tmp_path / "spans.jsonl.meta.json")
                          .read_text(encoding="utf-8"))
        assert meta["tagger"] == "fixture-gazetteer"


class TestExportScoresContract:
    def test_scores_load_and_cover_every_sentence(self, corpus_path, tmp_path):
        config = AdapterConfig(corpus=str(corpus_path), extractive_model="lead",
                               scores_out=str(tmp_path / "scores.jsonl"))
        target = export_sentence_scores(config)
        scores = load_external_scores(target)
        samples = load_corpus(corpus_path, "generic_jsonl")
        for sample in samples:
            sentences = segment_sentences(sample.document, sample.domain_tag)
            via_external = score_sentences(sample, "external", external=scores)
            assert len(via_external) == len(sentences)

    def test_three_sentence_sample_gets_three_lines(self, corpus_path, tmp_path):
        config = AdapterConfig(corpus=str(corpus_path), extractive_model="lead",
                               scores_out=str(tmp_path / "scores.jsonl"))
        target = export_sentence_scores(config)
        rows = [json.loads(line) for line in
                target.read_text(encoding="utf-8").splitlines()]
        a2 = [r for r in rows if r["sample_id"] == "a2"]
        # "#Sue#: IBM hired Alice. She starts Friday." segments into 2 sentences
        assert len(a2) == 2
        a4 = [r for r in rows if r["sample_id"] == "a4"]
        assert len(a4) == 1

    def test_lead_scorer_prefers_earlier_sentences(self, corpus_path, tmp_path):
        config = AdapterConfig(corpus=str(corpus_path), extractive_model="lead",
                               scores_out=str(tmp_path / "scores.jsonl"))
        scores = load_external_scores(export_sentence_scores(config))
        by_sample: dict[str, list] = {}
        for score in scores:
            by_sample.setdefault(score.sample_id, []).append(score)
        for rows in by_sample.values():
            values = [r.score for r in sorted(rows, key=lambda r: r.sentence_index)]
            assert values == sorted(values, reverse=True)


class TestFinetuneDryRun:
    def _write_training(self, tmp_path) -> Path:
        path = tmp_path / "train.jsonl"
        path.write_text(json.dumps({"id": "a1", "prompt": "p", "completion": "c"})
                        + "\n", encoding="utf-8")
        return path

    def test_dry_run_logs_emitted_hyperparameters(self, tmp_path, capsys):
        ft_path = tmp_path / "finetune.json"
        emit_finetune_config(ft_path)
        config = AdapterConfig(training_data=str(self._write_training(tmp_path)),
                               finetune_config=str(ft_path), dry_run=True)
        assert run_finetune(config) is None
        out = capsys.readouterr().out
        assert "resolved finetune config: r=8, alpha=32, dropout=0.05, epochs=3" in out
        assert "dry run: nothing trained" in out

    def test_overridden_config_logged_verbatim(self, tmp_path, capsys):
        ft_path = tmp_path / "finetune.json"
        emit_finetune_config(ft_path, epochs=1, learning_rate=1e-4)
        config = AdapterConfig(training_data=str(self._write_training(tmp_path)),
                               finetune_config=str(ft_path), dry_run=True)
        run_finetune(config)
        out = capsys.readouterr().out
        assert "epochs=1" in out
        assert "learning_rate=0.0001" in out

    def test_missing_training_file_errors_before_model_load(self, tmp_path):
        ft_path = tmp_path / "finetune.json"
        emit_finetune_config(ft_path)
        config = AdapterConfig(training_data=str(tmp_path / "missing.jsonl"),
                               finetune_config=str(ft_path), dry_run=True)
        with pytest.raises(AdapterError, match="training file"):
            run_finetune(config)

    def test_config_missing_core_key_rejected(self, tmp_path):
        ft_path = tmp_path / "finetune.json"
        ft_path.write_text('{"lora_rank": 8}', encoding="utf-8")
        config = AdapterConfig(training_data=str(self._write_training(tmp_path)),
                               finetune_config=str(ft_path), dry_run=True)
        with pytest.raises(AdapterError, match="misses keys"):
            resolve_finetune_config(config)
