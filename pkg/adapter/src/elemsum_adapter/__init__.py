"""Bridge between the pipeline's file schemas and the ML ecosystem."""

from .config import AdapterConfig, AdapterError
from .export import (export_sentence_scores, export_spans,
                     fetch_sentence_boundaries)
from .finetune import resolve_finetune_config, run_finetune

__version__ = "0.1.0"

__all__ = [
    "AdapterConfig", "AdapterError", "export_sentence_scores", "export_spans",
    "fetch_sentence_boundaries", "resolve_finetune_config", "run_finetune",
]
