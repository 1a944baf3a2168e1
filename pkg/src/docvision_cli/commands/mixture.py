"""Compose a shuffled manifest from a training data mixture."""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Annotated, Optional

import typer
from rich.table import Table

from docvision.io import atomic_write
from docvision.recipe import compose_mixture, load_mixture, mixture_stats, write_manifest

from .._cli_utils import Settings, err_console
from ._options import ConfigOpt


def mixture(
    table: Annotated[Optional[str], typer.Argument(help="Mixture CSV path or bundled name, e.g. 2b_pretrain")] = None,
    table_opt: Annotated[Optional[str], typer.Option("--table", help="Same as the TABLE argument")] = None,
    scale: Annotated[Optional[float], typer.Option("--scale", help="Fraction of the mixture to keep, in (0, 1] (default 1)")] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Shuffle seed (default 0)")] = None,
    out: Annotated[Optional[Path], typer.Option("--out", "-o", help="Manifest JSON-lines file (stdout when omitted)")] = None,
    stats: Annotated[bool, typer.Option("--stats", help="Only print per-task shares of the mixture")] = False,
    config: ConfigOpt = None,
) -> None:
    """
    Write one JSON line per sample: id, stage, task, input_type, schema_version.

    Example:
        $ docvision mixture 2b_pretrain --scale 1e-4 --seed 7 -o manifest.jsonl
        $ docvision mixture --table 2b_pretrain.csv --scale 1.0 --seed 7 -o full.jsonl
        $ docvision mixture 0.8b_finetune --stats
    """
    settings = Settings(config, ("scale", "seed", "out"))
    if (table is None) == (table_opt is None):
        raise typer.BadParameter("give the mixture table once, as TABLE or --table")
    mix = load_mixture(table if table is not None else table_opt)

    if stats:
        shares = Table(title=f"{mix.name} ({mix.total:,} samples)")
        shares.add_column("task")
        shares.add_column("share %", justify="right")
        for task, share in mixture_stats(mix).items():
            shares.add_row(task.value, f"{share:.1f}")
        err_console.print(shares)
        return

    try:
        manifest = compose_mixture(mix, settings.get("scale", scale, 1), int(settings.get("seed", seed, 0)))
    except ValueError as e:
        raise typer.BadParameter(str(e), param_hint="--scale") from None

    target = settings.get("out", out)
    if target is None:
        write_manifest(manifest, sys.stdout)
        sys.stdout.flush()
        return
    atomic_write(target, lambda f: write_manifest(manifest, f))
    err_console.print(f"[green]✓[/green] wrote {len(manifest):,} entries to {target}")
