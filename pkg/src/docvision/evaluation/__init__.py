"""Document-extraction and OCR evaluation."""

from .clients import HTTPInferenceClient, InferenceClient, ReplayClient
from .metrics import (
    aggregate,
    aggregate_ocr,
    effective_ted_score,
    kv_f1,
    normalize_ocr_text,
    ocr_text_score,
    overall_accuracy,
    perfect_match,
    score_prediction,
    score_sample,
    tree_edit_distance,
)
from .models import (
    DocType,
    DocTypeReport,
    EvalOutcome,
    EvalReport,
    EvalSetError,
    ExtractionResult,
    ExtractionSample,
    InferenceError,
    JsonNode,
    NodeKind,
    OcrCategory,
    OcrReport,
    OcrResult,
    OcrSample,
    ParseResult,
    ScoreBreakdown,
)
from .runner import (
    evaluate_sample,
    load_eval_set,
    load_results,
    run_eval,
    summarize,
)
from .trees import build_tree, canonicalize, flatten, parse_prediction, to_tree

__all__ = [
    # Types
    "DocType",
    "OcrCategory",
    "NodeKind",
    "JsonNode",
    "ParseResult",
    "ExtractionSample",
    "OcrSample",
    "ScoreBreakdown",
    "ExtractionResult",
    "OcrResult",
    "DocTypeReport",
    "EvalReport",
    "OcrReport",
    "EvalOutcome",
    # Errors
    "EvalSetError",
    "InferenceError",
    # Trees
    "canonicalize",
    "build_tree",
    "to_tree",
    "parse_prediction",
    "flatten",
    # Metrics
    "tree_edit_distance",
    "effective_ted_score",
    "kv_f1",
    "perfect_match",
    "score_prediction",
    "score_sample",
    "aggregate",
    "overall_accuracy",
    "normalize_ocr_text",
    "ocr_text_score",
    "aggregate_ocr",
    # Clients
    "InferenceClient",
    "HTTPInferenceClient",
    "ReplayClient",
    # Runner
    "load_eval_set",
    "load_results",
    "evaluate_sample",
    "run_eval",
    "summarize",
]
