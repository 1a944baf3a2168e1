"""Stage schedule loading and validation against the documented freeze patterns."""

from __future__ import annotations

import logging
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple, Union

import yaml

from ..io import parse_config_text
from .models import ScheduleParseError, StageKind, StageSchedule, ValidationReport

logger = logging.getLogger(__name__)

REQUIRED_IMAGE_SIZE = 448
REQUIRED_MAX_TILES = 6
REQUIRED_SCHEDULER = "cosine"

# (freeze_vit, freeze_llm) per stage; the projector always trains.
EXPECTED_FREEZE: Dict[StageKind, Tuple[bool, bool]] = {
    StageKind.PRETRAIN_2B: (False, True),
    StageKind.FINETUNE_2B: (False, False),
    StageKind.PRETRAIN_08B_STEP1: (True, True),
    StageKind.PRETRAIN_08B_STEP2: (True, False),
    StageKind.FINETUNE_08B: (False, False),
}

_REQUIRED_KEYS = (
    "freeze_vit",
    "freeze_llm",
    "freeze_mlp",
    "image_size",
    "max_num_tiles",
    "learning_rate",
    "scheduler",
    "batch_size",
    "weight_decay",
    "epochs",
)


def bundled_schedules() -> List[str]:
    root = resources.files("docvision.recipe").joinpath("data", "schedules")
    return sorted(p.name[: -len(".yaml")] for p in root.iterdir() if p.name.endswith(".yaml"))


def _as_bool(key: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    raise ScheduleParseError(f"{key}: expected true/false, got {value!r}")


def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ScheduleParseError(f"{key}: expected an integer, got {value!r}")
    try:
        number = int(str(value).strip())
    except ValueError:
        raise ScheduleParseError(f"{key}: expected an integer, got {value!r}") from None
    return number


def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise ScheduleParseError(f"{key}: expected a number, got {value!r}")
    try:
        return float(str(value).strip())
    except ValueError:
        raise ScheduleParseError(f"{key}: expected a number, got {value!r}") from None


def _as_pair(key: str, value: Any, cast: Callable[[str, Any], Any]) -> Tuple:
    """Read ``v`` or ``v1 -> v2`` (a stage that steps down mid-way)."""
    parts = str(value).split("->") if isinstance(value, str) else [value]
    if len(parts) > 2:
        raise ScheduleParseError(f"{key}: at most one '->' step is supported, got {value!r}")
    return tuple(cast(key, part) for part in parts)


def parse_schedule(data: Mapping[str, Any], stage: Optional[str] = None) -> StageSchedule:
    """
    Build a StageSchedule from a mapping of schedule keys.

    Raises:
        ScheduleParseError: On missing keys or values of the wrong type
    """
    if not isinstance(data, Mapping):
        raise ScheduleParseError("schedule must be a mapping of schedule keys to values")
    missing = [key for key in _REQUIRED_KEYS if key not in data]
    if missing:
        raise ScheduleParseError(f"schedule is missing keys: {', '.join(missing)}")

    hours = data.get("hours_of_training")
    hardware = data.get("hardware")
    return StageSchedule(
        stage=str(data.get("stage") or stage or "unnamed"),
        freeze_vit=_as_bool("freeze_vit", data["freeze_vit"]),
        freeze_llm=_as_bool("freeze_llm", data["freeze_llm"]),
        freeze_mlp=_as_bool("freeze_mlp", data["freeze_mlp"]),
        image_size=_as_int("image_size", data["image_size"]),
        max_num_tiles=_as_int("max_num_tiles", data["max_num_tiles"]),
        learning_rate=_as_pair("learning_rate", data["learning_rate"], _as_float),
        scheduler=str(data["scheduler"]).strip(),
        batch_size=_as_int("batch_size", data["batch_size"]),
        weight_decay=_as_float("weight_decay", data["weight_decay"]),
        epochs=_as_pair("epochs", data["epochs"], _as_int),
        hardware=None if hardware is None else str(hardware),
        hours_of_training=None if hours is None else _as_float("hours_of_training", hours),
    )


def load_schedule(source: Union[str, Path]) -> StageSchedule:
    """
    Load a schedule from a file or a bundled name such as ``2b_finetune``.

    Files may be YAML mappings or flat ``key=value`` lines using the same keys.
    """
    path = Path(source)
    if path.is_file():
        text, stem = path.read_text(encoding="utf-8"), path.stem
    else:
        stem = path.name[: -len(".yaml")] if path.name.endswith(".yaml") else path.name
        resource = resources.files("docvision.recipe").joinpath("data", "schedules", f"{stem}.yaml")
        if not resource.is_file():
            raise FileNotFoundError(f"no schedule file or bundled schedule named {str(source)!r}")
        text = resource.read_text(encoding="utf-8")
    try:
        data = parse_config_text(text)
    except (yaml.YAMLError, ValueError) as e:
        raise ScheduleParseError(f"schedule {stem!r} is not valid: {e}") from None
    return parse_schedule(data, stage=stem)


def _resolve_kind(schedule: StageSchedule, kind: Union[StageKind, str, None]) -> StageKind:
    if kind is None:
        kind = schedule.stage
    try:
        return StageKind(kind)
    except ValueError:
        known = ", ".join(k.value for k in StageKind)
        raise ValueError(f"unknown stage kind {kind!r} (known: {known})") from None


def validate_schedule(schedule: StageSchedule, kind: Union[StageKind, str, None] = None) -> ValidationReport:
    """
    Check a schedule against the freeze pattern and fixed settings of its stage.

    Each mismatching flag or setting is reported as its own violation.
    """
    stage_kind = _resolve_kind(schedule, kind)
    violations: List[str] = []

    expect_vit, expect_llm = EXPECTED_FREEZE[stage_kind]
    if schedule.freeze_vit != expect_vit:
        violations.append(
            f"freeze_vit is {str(schedule.freeze_vit).lower()}, expected {str(expect_vit).lower()} for {stage_kind.value}"
        )
    if schedule.freeze_llm != expect_llm:
        violations.append(
            f"freeze_llm is {str(schedule.freeze_llm).lower()}, expected {str(expect_llm).lower()} for {stage_kind.value}"
        )
    if schedule.freeze_mlp:
        violations.append("freeze_mlp is true: the MLP projector is never frozen in any training stage")

    if schedule.image_size != REQUIRED_IMAGE_SIZE:
        violations.append(f"image_size is {schedule.image_size}, expected {REQUIRED_IMAGE_SIZE}")
    if schedule.max_num_tiles != REQUIRED_MAX_TILES:
        violations.append(f"max_num_tiles is {schedule.max_num_tiles}, expected {REQUIRED_MAX_TILES}")
    if schedule.scheduler != REQUIRED_SCHEDULER:
        violations.append(f"scheduler is {schedule.scheduler!r}, expected {REQUIRED_SCHEDULER!r}")
    if any(lr <= 0 for lr in schedule.learning_rate):
        violations.append("learning_rate must be positive")
    if any(n <= 0 for n in schedule.epochs):
        violations.append("epochs must be positive")
    if schedule.batch_size <= 0:
        violations.append("batch_size must be positive")
    if schedule.weight_decay < 0:
        violations.append("weight_decay must be >= 0")

    report = ValidationReport(stage=schedule.stage, kind=stage_kind, violations=tuple(violations))
    if report.ok:
        logger.debug("Schedule %s satisfies %s", schedule.stage, stage_kind.value)
    else:
        logger.warning("Schedule %s has %d violation(s)", schedule.stage, len(violations))
    return report
