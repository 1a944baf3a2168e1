"""Cut an image into tiles and write them next to a plan sidecar."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated

import typer

from docvision.imaging import load_image, save_image
from docvision.io import write_json
from docvision.tiling import extract_tiles, plan_image, plan_to_dict

from .._cli_utils import Settings, console
from ._options import (
    TILING_KEYS,
    ConfigOpt,
    MaxTilesOpt,
    MinTilesOpt,
    MsacOpt,
    ProfileOpt,
    ThumbnailOpt,
    tiling_config,
)

PLAN_SIDECAR = "plan.json"


def preprocess(
    image: Annotated[Path, typer.Argument(help="Image to tile (PNG or JPEG)")],
    out_dir: Annotated[Path, typer.Option("--out-dir", "-o", help="Directory for tile PNGs and plan.json")],
    profile: ProfileOpt = None,
    msac: MsacOpt = None,
    min_tiles: MinTilesOpt = None,
    max_tiles: MaxTilesOpt = None,
    thumbnail: ThumbnailOpt = None,
    config: ConfigOpt = None,
) -> None:
    """
    Write ``tile_000.png``... in plan order plus ``plan.json``.

    Example:
        $ docvision preprocess receipt.png --out-dir tiles/
    """
    settings = Settings(config, TILING_KEYS)
    img = load_image(image)
    tiling = tiling_config(settings, profile, msac, min_tiles, max_tiles, thumbnail)
    result = plan_image(img.width, img.height, tiling)
    tiles = extract_tiles(img, result)

    out_dir.mkdir(parents=True, exist_ok=True)
    names = []
    for index, tile in enumerate(tiles):
        name = f"tile_{index:03d}.png"
        save_image(tile, out_dir / name)
        names.append(name)

    sidecar = plan_to_dict(result, tiling.tokens_per_tile, tiling)
    sidecar["source"] = image.name
    sidecar["tiles"] = names
    write_json(out_dir / PLAN_SIDECAR, sidecar)
    console.print(f"[bold green]✓[/bold green] Wrote {len(tiles)} tiles to {out_dir}")
