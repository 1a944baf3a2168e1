"""CLI utilities for the docvision command-line interface."""

from __future__ import annotations

import logging
import sys
from pathlib import Path
from typing import Any, Dict, Iterable, Optional

import click
import yaml
from rich.console import Console
from rich.logging import RichHandler

from docvision.io import atomic_write, dumps_json, parse_config_text

# Human-facing output; artifacts go to files or plain stdout
console = Console()
err_console = Console(stderr=True, soft_wrap=True, highlight=False)


def setup_logging(verbose: bool) -> None:
    """Route library logs to stderr through rich; INFO with ``--verbose``, WARNING otherwise."""
    root = logging.getLogger("docvision")
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = RichHandler(console=err_console, show_path=False, show_time=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.setLevel(logging.INFO if verbose else logging.WARNING)
    root.propagate = False


class Settings:
    """
    Option values merged from flags, a ``--config`` file and defaults.

    An explicit flag wins over the config file, which wins over the default.
    Config keys are long flag names with underscores, written as YAML or as
    ``key=value`` lines.
    """

    def __init__(self, config_path: Optional[Path], allowed: Iterable[str]):
        self._values: Dict[str, Any] = {}
        if config_path is None:
            return
        try:
            data = parse_config_text(Path(config_path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise click.UsageError(f"config file not found: {config_path}") from None
        except (yaml.YAMLError, ValueError) as e:
            raise click.UsageError(f"config file {config_path} is not valid: {e}") from None
        if data is None:
            return
        if not isinstance(data, dict):
            raise click.UsageError(f"config file {config_path} must be a flat mapping of option names to values")
        allowed = set(allowed)
        unknown = sorted(str(k) for k in data if k not in allowed)
        if unknown:
            raise click.UsageError(f"unknown config keys in {config_path}: {', '.join(unknown)}")
        self._values = dict(data)

    def get(self, name: str, flag_value: Any, default: Any = None) -> Any:
        if flag_value is not None:
            return flag_value
        return self._values.get(name, default)


def emit_json(data: Any, out: Optional[Path]) -> None:
    """Write ``data`` as stable JSON to ``out`` atomically, or to stdout."""
    text = dumps_json(data)
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    atomic_write(out, lambda f: f.write(text))
    err_console.print(f"[green]✓[/green] wrote {out}")
