"""Run the desk-scale forward path over an image and write the shape trace."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Optional

import typer

from docvision.imaging import load_image
from docvision.tiling import plan_image
from docvision.vision import ChatTemplate, ModelConfig, forward_trace

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


def forward(
    image: Annotated[Path, typer.Argument(help="Image to encode (PNG or JPEG)")],
    prompt: Annotated[Optional[str], typer.Option("--prompt", "-p", help="User prompt placed after the image")] = None,
    template: Annotated[
        Optional[Path], typer.Option("--template", help="Chat template YAML (bundled template when omitted)")
    ] = None,
    seed: Annotated[Optional[int], typer.Option("--seed", help="Weight initialization seed (default 0)")] = None,
    jobs: Annotated[Optional[int], typer.Option("--jobs", "-j", min=1, help="Tiles encoded in parallel (default 1)")] = None,
    profile: ProfileOpt = None,
    msac: MsacOpt = None,
    min_tiles: MinTilesOpt = None,
    max_tiles: MaxTilesOpt = None,
    thumbnail: ThumbnailOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
) -> None:
    """
    Encode every planned tile and print per-stage shapes, token counts and checksums.

    Example:
        $ docvision forward receipt.png --prompt "Extract the total" -o trace.json
    """
    settings = Settings(config, TILING_KEYS + ("prompt", "template", "seed", "jobs", "out"))
    img = load_image(image)
    tiling = tiling_config(settings, profile, msac, min_tiles, max_tiles, thumbnail)
    result = plan_image(img.width, img.height, tiling)

    template_path = settings.get("template", template)
    chat = ChatTemplate.from_yaml(template_path) if template_path else ChatTemplate.default()
    cfg = ModelConfig(tile_size=tiling.tile_size, seed=int(settings.get("seed", seed, 0)))
    trace = forward_trace(
        img,
        result,
        cfg,
        prompt=str(settings.get("prompt", prompt, "")),
        template=chat,
        jobs=int(settings.get("jobs", jobs, 1)),
        tiling=tiling,
    )
    emit_json(trace, settings.get("out", out))
