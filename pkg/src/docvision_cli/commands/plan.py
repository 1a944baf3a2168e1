"""Plan the tile grid for an image."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Annotated, Optional, Tuple

import typer

from docvision.imaging import load_image
from docvision.tiling import plan_image, plan_to_dict

from .._cli_utils import Settings, emit_json
from ._options import (
    TILING_KEYS,
    ConfigOpt,
    MaxTilesOpt,
    MinTilesOpt,
    MsacOpt,
    OutOpt,
    ProfileOpt,
    ThumbnailOpt,
    tiling_config,
)

_SIZE = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*$")


def _parse_size(text: str) -> Tuple[int, int]:
    match = _SIZE.match(text)
    if not match:
        raise typer.BadParameter(f"expected WIDTHxHEIGHT, got {text!r}", param_hint="--size")
    w, h = int(match.group(1)), int(match.group(2))
    if w <= 0 or h <= 0:
        raise typer.BadParameter("width and height must be positive", param_hint="--size")
    return w, h


def plan(
    image: Annotated[Optional[Path], typer.Argument(help="Image to plan (PNG or JPEG)")] = None,
    size: Annotated[Optional[str], typer.Option("--size", help="Plan for WIDTHxHEIGHT instead of an image file")] = None,
    width: Annotated[Optional[int], typer.Option("--width", min=1, help="Image width in pixels, with --height")] = None,
    height: Annotated[Optional[int], typer.Option("--height", min=1, help="Image height in pixels, with --width")] = None,
    profile: ProfileOpt = None,
    msac: MsacOpt = None,
    min_tiles: MinTilesOpt = None,
    max_tiles: MaxTilesOpt = None,
    thumbnail: ThumbnailOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
) -> None:
    """
    Plan the tile grid for an image and print the plan JSON.

    Example:
        $ docvision plan receipt.png --profile 2b
        $ docvision plan --size 1000x500 --no-msac
        $ docvision plan --width 896 --height 448 --max-tiles 6
    """
    settings = Settings(config, TILING_KEYS + ("out",))
    if (width is None) != (height is None):
        raise typer.BadParameter("--width and --height go together")
    sources = [image is not None, size is not None, width is not None]
    if sum(sources) != 1:
        raise typer.BadParameter("give exactly one of IMAGE, --size or --width/--height")
    if image is not None:
        width, height = load_image(image).size
    elif size is not None:
        width, height = _parse_size(size)

    tiling = tiling_config(settings, profile, msac, min_tiles, max_tiles, thumbnail)
    result = plan_image(width, height, tiling)
    emit_json(plan_to_dict(result, tiling.tokens_per_tile, tiling), settings.get("out", out))
