"""Evaluate model answers on an eval set."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Optional

import typer

from docvision.evaluation import HTTPInferenceClient, ReplayClient, load_eval_set, run_eval

from .._cli_utils import Settings, emit_json, err_console
from ._options import ConfigOpt

CLIENTS = ("replay", "http")


def eval_(
    eval_set: Annotated[Path, typer.Option("--set", help="Eval set JSON-lines file")],
    results: Annotated[
        Optional[Path],
        typer.Option("--results", help="Per-sample results JSON-lines file, resumed when present (default <set>.results.jsonl)"),
    ] = None,
    client: Annotated[Optional[str], typer.Option("--client", help="replay or http (default replay)")] = None,
    fixtures: Annotated[
        Optional[Path], typer.Option("--fixtures", help="Replay fixtures directory (default <set dir>/responses)")
    ] = None,
    endpoint: Annotated[Optional[str], typer.Option("--endpoint", help="HTTP endpoint (or DOCVISION_ENDPOINT)")] = None,
    model: Annotated[Optional[str], typer.Option("--model", help="Model name sent to the endpoint")] = None,
    timeout: Annotated[Optional[float], typer.Option("--timeout", help="HTTP request timeout in seconds (default 60)")] = None,
    jobs: Annotated[Optional[int], typer.Option("--jobs", "-j", min=1, help="Requests in flight (default 1)")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Report JSON file (stdout when omitted)")] = None,
    config: ConfigOpt = None,
) -> None:
    """
    Query a client for every sample, score, and write the aggregate report.

    Example:
        $ docvision eval --set fixtures/eval.jsonl --results results.jsonl -o report.json
        $ docvision eval --set docs.jsonl --results r.jsonl --client http --endpoint http://localhost:8000/chat
    """
    settings = Settings(config, ("client", "fixtures", "endpoint", "model", "timeout", "jobs", "out"))
    kind = settings.get("client", client, "replay")
    if kind not in CLIENTS:
        raise typer.BadParameter(f"expected one of {', '.join(CLIENTS)}, got {kind!r}", param_hint="--client")

    samples = load_eval_set(eval_set)
    results_path = results or eval_set.with_name(f"{eval_set.stem}.results.jsonl")
    if kind == "replay":
        backend = ReplayClient(settings.get("fixtures", fixtures, eval_set.parent / "responses"))
    else:
        backend = HTTPInferenceClient(
            endpoint=settings.get("endpoint", endpoint),
            model=settings.get("model", model),
            request_timeout_s=float(settings.get("timeout", timeout, 60.0)),
        )

    with backend:
        outcome = run_eval(samples, backend, results_path, concurrency=int(settings.get("jobs", jobs, 1)))
    if outcome.errored_ids:
        err_console.print(f"[yellow]![/yellow] {len(outcome.errored_ids)} sample(s) errored and scored 0")
    emit_json(outcome.to_dict(), settings.get("out", out))
