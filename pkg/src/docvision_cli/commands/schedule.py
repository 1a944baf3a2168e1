"""Validate stage schedules against their documented freeze patterns."""

from __future__ import annotations

from typing import Annotated, List, Optional

import typer

from docvision.recipe import bundled_schedules, load_schedule, validate_schedule

from .._cli_utils import emit_json, err_console
from ._options import OutOpt


def schedule(
    sources: Annotated[
        Optional[List[str]],
        typer.Argument(help="Schedule YAML paths or bundled names (all bundled schedules when omitted)"),
    ] = None,
    kind: Annotated[
        Optional[str], typer.Option("--kind", help="Stage kind to check against (inferred from the stage name)")
    ] = None,
    out: OutOpt = None,
) -> None:
    """
    Print a validation report; exit 1 if any schedule breaks its stage's rules.

    Example:
        $ docvision schedule
        $ docvision schedule my_stage.yaml --kind 2b_finetune
    """
    names = sources or bundled_schedules()
    reports = []
    for source in names:
        stage = load_schedule(source)
        try:
            report = validate_schedule(stage, kind)
        except ValueError as e:
            raise typer.BadParameter(str(e), param_hint="--kind") from None
        reports.append(report)
        for violation in report.violations:
            err_console.print(f"[red]✗[/red] {stage.stage}: {violation}")

    emit_json({"schedules": [r.to_dict() for r in reports]}, out)
    if not all(r.ok for r in reports):
        raise typer.Exit(1)
