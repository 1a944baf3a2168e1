"""Re-aggregate an existing per-sample results file."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated

import typer
from rich.table import Table

from docvision.evaluation import load_results, summarize

from .._cli_utils import emit_json, err_console
from ._options import OutOpt


def report(
    results: Annotated[Path, typer.Argument(help="Results JSON-lines file written by `docvision eval`")],
    out: OutOpt = None,
) -> None:
    """
    Print the aggregate report for a results file, with a summary table on stderr.

    Example:
        $ docvision report results.jsonl -o report.json
    """
    outcome = summarize(load_results(results))
    if outcome.extraction is not None:
        summary = Table(title="Document extraction")
        for column in ("doc type", "n", "perfect", "eff. TED", "F1", "accuracy"):
            summary.add_column(column, justify="left" if column == "doc type" else "right")
        for doc_type, row in outcome.extraction.per_type.items():
            summary.add_row(
                doc_type.value,
                str(row.count),
                f"{row.perfect_match:.3f}",
                f"{row.effective_ted:.3f}",
                f"{row.kv_f1:.3f}",
                f"{row.accuracy:.2f}",
            )
        summary.add_row("overall", "", "", "", "", f"{outcome.extraction.overall:.2f}")
        err_console.print(summary)
    if outcome.ocr is not None:
        err_console.print(f"OCR score: {outcome.ocr.score}/{outcome.ocr.total}")
    emit_json(outcome.to_dict(), out)
