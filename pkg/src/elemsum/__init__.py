"""Key-element-annotated instruction data construction and summary scoring.

The pipeline marks named entities of high-relevance types and the top
extractive "conclusion" sentence inside source documents, assembles
instruction-tuning prompts from the annotated documents, and scores model
summaries for entity inclusion, unigram overlap, and length-dependent
behavior.
"""

from .annotate import (AnnotatedDocument, AnnotationPlan, apply_plan,
                       resolve_spans, strip_annotations)
from .conclusion import (SentenceScore, load_external_scores, pick_conclusion,
                         score_sentences)
from .corpus import (Sample, SentenceSpan, Token, load_corpus,
                     segment_sentences, tokenize)
from .entities import (ONTONOTES_TYPES, EntitySpan, Gazetteer,
                       ValidationReport, gazetteer_tag, load_spans, save_spans,
                       validate_spans)
from .evaluate import (CandidateSummary, InclusionReport, JudgeReport,
                       JudgeVerdict, LengthSplitReport, RougeScore,
                       aggregate_verdicts, emit_judge_prompts,
                       entity_inclusion, length_split, load_candidates,
                       load_verdicts, rouge1)
from .jsonl import FormatError
from .keyselect import (EntityTypeStats, SelectionConfig, compute_type_stats,
                        select_types)
from .prompts import (InstructionTemplate, PromptRecord, build_instruction,
                      build_record, emit_finetune_config, emit_inference_set,
                      emit_training_set, load_finetune_config)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedDocument", "AnnotationPlan", "CandidateSummary",
    "EntitySpan", "EntityTypeStats", "FormatError", "Gazetteer",
    "InclusionReport", "InstructionTemplate", "JudgeReport", "JudgeVerdict",
    "LengthSplitReport", "ONTONOTES_TYPES", "PromptRecord", "RougeScore",
    "Sample", "SelectionConfig", "SentenceScore", "SentenceSpan", "Token",
    "ValidationReport",
    "aggregate_verdicts", "apply_plan", "build_instruction", "build_record",
    "compute_type_stats", "emit_finetune_config", "emit_inference_set",
    "emit_judge_prompts", "emit_training_set", "entity_inclusion",
    "gazetteer_tag", "length_split", "load_candidates", "load_corpus",
    "load_external_scores", "load_finetune_config", "load_spans",
    "load_verdicts", "pick_conclusion", "resolve_spans", "rouge1",
    "save_spans", "score_sentences", "segment_sentences", "select_types",
    "strip_annotations", "tokenize", "validate_spans",
]
