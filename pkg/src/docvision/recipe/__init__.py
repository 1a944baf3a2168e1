"""Training-recipe data: mixture tables, manifests and stage schedules."""

from .mixture import (
    bundled_mixtures,
    compose_mixture,
    load_mixture,
    mixture_stats,
    parse_mixture,
    scale_counts,
    write_manifest,
)
from .models import (
    InputType,
    Manifest,
    ManifestEntry,
    MixtureParseError,
    MixtureRow,
    MixtureTable,
    MixtureValidationError,
    ScheduleParseError,
    StageKind,
    StageSchedule,
    Task,
    ValidationReport,
)
from .schedule import (
    EXPECTED_FREEZE,
    bundled_schedules,
    load_schedule,
    parse_schedule,
    validate_schedule,
)

__all__ = [
    # Types
    "Task",
    "InputType",
    "StageKind",
    "MixtureRow",
    "MixtureTable",
    "Manifest",
    "ManifestEntry",
    "StageSchedule",
    "ValidationReport",
    # Errors
    "MixtureParseError",
    "MixtureValidationError",
    "ScheduleParseError",
    # Mixtures
    "bundled_mixtures",
    "load_mixture",
    "parse_mixture",
    "scale_counts",
    "compose_mixture",
    "write_manifest",
    "mixture_stats",
    # Schedules
    "EXPECTED_FREEZE",
    "bundled_schedules",
    "load_schedule",
    "parse_schedule",
    "validate_schedule",
]
