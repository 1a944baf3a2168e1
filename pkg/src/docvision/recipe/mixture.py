"""Loading, scaling and shuffling of training data mixtures."""

from __future__ import annotations

import csv
import io
import json
import logging
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, List, TextIO, Tuple, Union

import numpy as np

from .models import (
    InputType,
    Manifest,
    MixtureParseError,
    MixtureRow,
    MixtureTable,
    MixtureValidationError,
    Task,
)

logger = logging.getLogger(__name__)

MIXTURE_HEADER = ("task", "input_type", "count")
TOTAL_ROW = "total"


def bundled_mixtures() -> List[str]:
    """Names of the mixture tables shipped with the package."""
    root = resources.files("docvision.recipe").joinpath("data", "mixtures")
    return sorted(p.name[: -len(".csv")] for p in root.iterdir() if p.name.endswith(".csv"))


def _read_source(source: Union[str, Path]) -> Tuple[str, str]:
    path = Path(source)
    if path.is_file():
        return path.stem, path.read_text(encoding="utf-8")
    name = path.name[: -len(".csv")] if path.name.endswith(".csv") else path.name
    resource = resources.files("docvision.recipe").joinpath("data", "mixtures", f"{name}.csv")
    if not resource.is_file():
        raise FileNotFoundError(f"no mixture file or bundled mixture named {str(source)!r}")
    return name, resource.read_text(encoding="utf-8")


def parse_mixture(name: str, text: str) -> MixtureTable:
    """
    Parse mixture CSV text.

    The header must be ``task,input_type,count``. An optional ``total`` row
    declares the expected sum, which must match the rows.

    Raises:
        MixtureParseError: On malformed rows, unknown enum values or bad counts
        MixtureValidationError: If the declared total disagrees with the rows
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MixtureParseError(f"mixture {name!r} is empty") from None
    if tuple(h.strip() for h in header) != MIXTURE_HEADER:
        raise MixtureParseError(f"mixture {name!r}: expected header {','.join(MIXTURE_HEADER)}, got {','.join(header)}")

    rows: List[MixtureRow] = []
    declared = None
    for line_no, record in enumerate(reader, start=2):
        if not record or all(not cell.strip() for cell in record):
            continue
        if len(record) != 3:
            raise MixtureParseError(f"mixture {name!r} line {line_no}: expected 3 fields, got {len(record)}")
        task, input_type, count_text = (cell.strip() for cell in record)
        try:
            count = int(count_text)
        except ValueError:
            raise MixtureParseError(f"mixture {name!r} line {line_no}: count {count_text!r} is not an integer") from None
        if count < 0:
            raise MixtureParseError(f"mixture {name!r} line {line_no}: count must be >= 0")
        if task == TOTAL_ROW:
            declared = count
            continue
        try:
            key = (Task(task), InputType(input_type))
        except ValueError as e:
            raise MixtureParseError(f"mixture {name!r} line {line_no}: {e}") from None
        rows.append(MixtureRow(task=key[0], input_type=key[1], count=count))

    try:
        table = MixtureTable(name=name, rows=tuple(rows))
    except ValueError as e:
        raise MixtureParseError(str(e)) from None
    if declared is not None and declared != table.total:
        raise MixtureValidationError(name, declared, table.total)
    return table


def load_mixture(source: Union[str, Path]) -> MixtureTable:
    """Load a mixture from a CSV path or a bundled name such as ``2b_pretrain``."""
    name, text = _read_source(source)
    table = parse_mixture(name, text)
    logger.debug("Loaded mixture %s: %d rows, %d samples", name, len(table.rows), table.total)
    return table


def scale_counts(counts: Iterable[int], scale: Union[float, Fraction, str]) -> List[int]:
    """
    Scale integer counts so they sum to ``round(total * scale)``.

    Each count is floored, then leftover units go to the largest fractional
    remainders; ties go to the earlier row. Arithmetic is exact.
    """
    counts = list(counts)
    factor = scale if isinstance(scale, Fraction) else Fraction(str(scale))
    if not (0 < factor <= 1):
        raise ValueError(f"scale must be in (0, 1], got {scale}")

    quotas = [c * factor for c in counts]
    floors = [q.numerator // q.denominator for q in quotas]
    target = int((sum(counts) * factor + Fraction(1, 2)) // 1)
    leftover = target - sum(floors)
    ranked = sorted(range(len(counts)), key=lambda i: (-(quotas[i] - floors[i]), i))
    for i in ranked[:leftover]:
        floors[i] += 1
    return floors


def compose_mixture(
    table: MixtureTable,
    scale: Union[float, Fraction, str] = 1,
    seed: int = 0,
) -> Manifest:
    """
    Build a shuffled manifest that realizes ``table`` at ``scale``.

    The same table, scale and seed always give the same manifest.
    """
    scaled = scale_counts((row.count for row in table.rows), scale)
    rows = tuple(MixtureRow(task=row.task, input_type=row.input_type, count=n) for row, n in zip(table.rows, scaled))
    total = sum(scaled)
    rng = np.random.default_rng(seed)
    order = rng.permutation(total).astype(np.int64)
    logger.info("Composed %s at scale %s: %d entries (seed=%d)", table.name, scale, total, seed)
    return Manifest(stage=table.name, seed=seed, rows=rows, order=order)


def write_manifest(manifest: Manifest, stream: TextIO) -> int:
    """Stream a manifest as JSON lines; returns the number of lines written."""
    written = 0
    for entry in manifest.entries():
        stream.write(json.dumps(entry.to_dict(), separators=(",", ":")))
        stream.write("\n")
        written += 1
    return written


def mixture_stats(table: MixtureTable) -> Dict[Task, float]:
    """
    Percentage share of each task, rounded to one decimal.

    Raises:
        ValueError: If the table holds no samples
    """
    total = table.total
    if total == 0:
        raise ValueError(f"mixture {table.name!r} is empty")
    per_task: Dict[Task, int] = {}
    for row in table.rows:
        per_task[row.task] = per_task.get(row.task, 0) + row.count
    return {task: round(100.0 * n / total, 1) for task, n in per_task.items()}
