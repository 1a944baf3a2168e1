"""
Data models for document-extraction and OCR evaluation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

RESULTS_SCHEMA_VERSION = 1


class EvalSetError(ValueError):
    """Raised for a malformed eval set or an unusable evaluation setup."""


class InferenceError(RuntimeError):
    """Raised when a client cannot produce a prediction for one sample."""


class DocType(str, enum.Enum):
    RECEIPT = "receipt"
    DRIVERS_LICENSE = "drivers_license"
    CHECK = "check"
    OTHER = "other"


class OcrCategory(str, enum.Enum):
    TEXT_RECOGNITION = "text_recognition"
    SCENE_TEXT_VQA = "scene_text_vqa"
    DOC_VQA = "doc_vqa"
    KIE = "kie"
    HMER = "hmer"


class NodeKind(str, enum.Enum):
    OBJECT = "object"
    ARRAY = "array"
    SCALAR = "scalar"


@dataclass(frozen=True)
class JsonNode:
    """
    One node of a canonical JSON tree.

    ``key`` is the object key or ``[i]`` array index that leads to the node
    (``$`` at the root). Scalars carry their canonical string in ``value``.
    """

    key: str
    kind: NodeKind
    value: Optional[str] = None
    children: Tuple["JsonNode", ...] = ()

    @property
    def label(self) -> str:
        if self.kind is NodeKind.SCALAR:
            return f"{self.key}={self.value}"
        return f"{self.key}:{self.kind.value}"

    @property
    def size(self) -> int:
        return 1 + sum(child.size for child in self.children)


@dataclass(frozen=True)
class ParseResult:
    """Outcome of reading a model's raw output as JSON; failure is a value."""

    tree: Optional[JsonNode] = None
    value: Any = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.tree is not None

    @classmethod
    def failure(cls, error: str) -> "ParseResult":
        return cls(tree=None, value=None, error=error)


@dataclass(frozen=True)
class ExtractionSample:
    sample_id: str
    doc_type: DocType
    prompt: str
    ground_truth: Any
    images: Tuple[str, ...] = ()
    raw_prediction: Optional[str] = None


@dataclass(frozen=True)
class OcrSample:
    sample_id: str
    category: OcrCategory
    prompt: str
    answers: Tuple[str, ...]
    images: Tuple[str, ...] = ()
    raw_prediction: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.answers:
            raise ValueError(f"OCR sample {self.sample_id!r} has no reference answers")


@dataclass(frozen=True)
class ScoreBreakdown:
    perfect_match: int
    effective_ted: float
    kv_f1: float
    parsed: bool
    errored: bool = False

    def __post_init__(self) -> None:
        if self.perfect_match not in (0, 1):
            raise ValueError(f"perfect_match must be 0 or 1, got {self.perfect_match}")
        for name in ("effective_ted", "kv_f1"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        if self.perfect_match and (self.effective_ted != 1.0 or self.kv_f1 != 1.0):
            raise ValueError("a perfect match must score 1.0 on effective TED and F1")
        if not self.parsed and (self.perfect_match or self.effective_ted or self.kv_f1):
            raise ValueError("an unparsed prediction must score 0 on every metric")

    @property
    def accuracy(self) -> float:
        return (self.perfect_match + self.effective_ted + self.kv_f1) / 3.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "perfect_match": self.perfect_match,
            "effective_ted": round(self.effective_ted, 6),
            "kv_f1": round(self.kv_f1, 6),
            "parsed": self.parsed,
            "errored": self.errored,
        }


@dataclass(frozen=True)
class ExtractionResult:
    """A scored extraction sample as persisted in the results file."""

    sample_id: str
    doc_type: DocType
    scores: ScoreBreakdown
    raw_prediction: Optional[str] = None
    error: Optional[str] = None


@dataclass(frozen=True)
class OcrResult:
    sample_id: str
    category: OcrCategory
    correct: int
    raw_prediction: Optional[str] = None
    error: Optional[str] = None

    @property
    def errored(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class DocTypeReport:
    doc_type: DocType
    count: int
    perfect_match: float
    effective_ted: float
    kv_f1: float
    parse_rate: float
    errored: int

    @property
    def accuracy(self) -> float:
        """Mean of the three metric means, on a 0-100 scale."""
        return 100.0 * (self.perfect_match + self.effective_ted + self.kv_f1) / 3.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "count": self.count,
            "perfect_match": round(self.perfect_match, 6),
            "effective_ted": round(self.effective_ted, 6),
            "kv_f1": round(self.kv_f1, 6),
            "accuracy": round(self.accuracy, 4),
            "parse_rate": round(self.parse_rate, 6),
            "errored": self.errored,
        }


@dataclass(frozen=True)
class EvalReport:
    """Per-document-type accuracies; ``overall`` is their unweighted mean."""

    per_type: Dict[DocType, DocTypeReport]
    overall: float

    @property
    def num_samples(self) -> int:
        return sum(r.count for r in self.per_type.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "doc_types": {t.value: r.to_dict() for t, r in self.per_type.items()},
            "overall": round(self.overall, 4),
            "num_samples": self.num_samples,
        }


@dataclass(frozen=True)
class OcrReport:
    """Benchmark-style integer score: number of correct answers per category."""

    correct: Dict[OcrCategory, int]
    totals: Dict[OcrCategory, int]
    errored: int = 0

    @property
    def score(self) -> int:
        return sum(self.correct.values())

    @property
    def total(self) -> int:
        return sum(self.totals.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "categories": {
                c.value: {"correct": self.correct[c], "total": self.totals[c]} for c in self.totals
            },
            "score": self.score,
            "total": self.total,
            "errored": self.errored,
        }


@dataclass(frozen=True)
class EvalOutcome:
    """Everything one evaluation run produced."""

    extraction: Optional[EvalReport] = None
    ocr: Optional[OcrReport] = None
    scored: int = 0
    skipped: int = 0
    errored_ids: Tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": RESULTS_SCHEMA_VERSION,
            "extraction": None if self.extraction is None else self.extraction.to_dict(),
            "ocr": None if self.ocr is None else self.ocr.to_dict(),
            "errored_ids": list(self.errored_ids),
        }
