"""File helpers shared by the library and the CLI."""

from __future__ import annotations

import json
import os
import re
import tempfile
from pathlib import Path
from typing import Any, Callable, Dict, TextIO, Union

import yaml

_KEY_VALUE = re.compile(r"^\s*([A-Za-z_][\w.-]*)\s*=(.*)$")


def atomic_write(path: Union[str, Path], writer: Callable[[TextIO], Any]) -> None:
    """
    Write a text file through ``writer`` and move it into place in one step.

    Readers never observe a partially written file.
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            writer(f)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_json(data: Any) -> str:
    """Stable JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_json(path: Union[str, Path], data: Any) -> None:
    text = dumps_json(data)
    atomic_write(path, lambda f: f.write(text))


def parse_config_text(text: str) -> Any:
    """
    Parse a flat config file written either as ``key=value`` lines or as YAML.

    A file is read as ``key=value`` when every non-blank, non-``#`` line has
    that shape. Each value then goes through YAML scalar resolution, so
    ``false`` and ``6`` come back as a bool and an int and an empty value is
    ``None``. Anything else is handed to ``yaml.safe_load`` unchanged.

    Raises:
        yaml.YAMLError: On malformed YAML or a value that is not a valid scalar
        ValueError: On a repeated ``key=value`` key
    """
    lines = [line for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
    matches = [_KEY_VALUE.match(line) for line in lines]
    if not lines or not all(matches):
        return yaml.safe_load(text)

    data: Dict[str, Any] = {}
    for match in matches:
        key, raw = match.group(1), match.group(2).strip()
        if key in data:
            raise ValueError(f"duplicate config key {key!r}")
        data[key] = yaml.safe_load(raw) if raw else None
    return data
