"""
Data models for the training recipe: data mixtures, manifests and stage schedules.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

MANIFEST_SCHEMA_VERSION = 1


class Task(str, enum.Enum):
    GENERAL_QA = "general_qa"
    REASONING = "reasoning"
    CAPTIONING = "captioning"
    OCR_DOC = "ocr_doc"
    TEXTBOOK = "textbook"
    CHART_TABLE = "chart_table"
    IMAGE_DIFF = "image_diff"


class InputType(str, enum.Enum):
    MULTI_IMAGE = "multi_image"
    SINGLE_IMAGE = "single_image"
    TEXT_ONLY = "text_only"


class StageKind(str, enum.Enum):
    PRETRAIN_2B = "2b_pretrain"
    FINETUNE_2B = "2b_finetune"
    PRETRAIN_08B_STEP1 = "0.8b_pretrain_step1"
    PRETRAIN_08B_STEP2 = "0.8b_pretrain_step2"
    FINETUNE_08B = "0.8b_finetune"


class MixtureParseError(ValueError):
    """Raised when a mixture CSV is malformed."""


class MixtureValidationError(ValueError):
    """Raised when a mixture's declared total disagrees with its rows."""

    def __init__(self, name: str, declared: int, computed: int):
        super().__init__(f"mixture {name!r} declares total {declared} but rows sum to {computed}")
        self.declared = declared
        self.computed = computed


class ScheduleParseError(ValueError):
    """Raised when a stage schedule file is malformed."""


@dataclass(frozen=True)
class MixtureRow:
    task: Task
    input_type: InputType
    count: int

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError(f"row count must be >= 0, got {self.count} for {self.task.value}/{self.input_type.value}")

    @property
    def key(self) -> Tuple[Task, InputType]:
        return self.task, self.input_type


@dataclass(frozen=True)
class MixtureTable:
    """One training stage's data mixture; ``total`` is always recomputed from the rows."""

    name: str
    rows: Tuple[MixtureRow, ...]

    def __post_init__(self) -> None:
        seen = set()
        for row in self.rows:
            if row.key in seen:
                raise ValueError(
                    f"duplicate row {row.task.value}/{row.input_type.value} in mixture {self.name!r}"
                )
            seen.add(row.key)

    @property
    def total(self) -> int:
        return sum(row.count for row in self.rows)


@dataclass(frozen=True)
class ManifestEntry:
    sample_id: str
    stage: str
    task: Task
    input_type: InputType

    def to_dict(self) -> Dict[str, object]:
        return {
            "id": self.sample_id,
            "stage": self.stage,
            "task": self.task.value,
            "input_type": self.input_type.value,
            "schema_version": MANIFEST_SCHEMA_VERSION,
        }


@dataclass(frozen=True, eq=False)
class Manifest:
    """
    A shuffled listing of synthetic samples realizing a (scaled) mixture.

    Entries are produced lazily from the scaled rows and a permutation of the
    flat sample index, so multi-million-entry manifests stay cheap to hold.
    """

    stage: str
    seed: int
    rows: Tuple[MixtureRow, ...]
    order: np.ndarray

    def __len__(self) -> int:
        return int(self.order.shape[0])

    @property
    def counts(self) -> Dict[Tuple[Task, InputType], int]:
        return {row.key: row.count for row in self.rows}

    def entries(self, chunk_size: int = 65536) -> Iterator[ManifestEntry]:
        offsets = np.cumsum([0] + [row.count for row in self.rows])
        for start in range(0, len(self), chunk_size):
            flat = self.order[start : start + chunk_size]
            row_idx = np.searchsorted(offsets, flat, side="right") - 1
            local = flat - offsets[row_idx]
            for r, i in zip(row_idx.tolist(), local.tolist()):
                row = self.rows[r]
                yield ManifestEntry(
                    sample_id=f"{self.stage}/{row.task.value}/{row.input_type.value}/{i:08d}",
                    stage=self.stage,
                    task=row.task,
                    input_type=row.input_type,
                )


@dataclass(frozen=True)
class StageSchedule:
    """
    Hyperparameters and freeze flags for one training stage.

    ``learning_rate`` and ``epochs`` hold one value, or two for a stage that
    steps down mid-way (``4e-5 -> 2e-5``); ``sub_stages`` expands such pairs.
    """

    stage: str
    freeze_vit: bool
    freeze_llm: bool
    freeze_mlp: bool
    image_size: int
    max_num_tiles: int
    learning_rate: Tuple[float, ...]
    scheduler: str
    batch_size: int
    weight_decay: float
    epochs: Tuple[int, ...]
    hardware: Optional[str] = None
    hours_of_training: Optional[float] = None

    def sub_stages(self) -> List["StageSchedule"]:
        """Split annotated pairs into sequential single-value stages."""
        n = max(len(self.learning_rate), len(self.epochs))
        if n == 1:
            return [self]

        def pick(values: Tuple, i: int):
            return values[i] if len(values) > 1 else values[0]

        return [
            replace(
                self,
                stage=f"{self.stage}/{i + 1}",
                learning_rate=(pick(self.learning_rate, i),),
                epochs=(pick(self.epochs, i),),
            )
            for i in range(n)
        ]

    @property
    def total_epochs(self) -> int:
        return sum(self.epochs)


@dataclass(frozen=True)
class ValidationReport:
    stage: str
    kind: StageKind
    violations: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, object]:
        return {
            "stage": self.stage,
            "kind": self.kind.value,
            "valid": self.ok,
            "violations": list(self.violations),
        }
