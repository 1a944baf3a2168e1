"""Options shared across commands; the tiling group backs `plan`, `preprocess` and `forward`."""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Annotated, Optional

import typer

from docvision.tiling import TilingConfig, load_profile

from .._cli_utils import Settings

TILING_KEYS = ("profile", "msac", "min_tiles", "max_tiles", "thumbnail")

ProfileOpt = Annotated[Optional[str], typer.Option("--profile", help="Model profile: 0.8b or 2b (default 2b)")]
MsacOpt = Annotated[Optional[bool], typer.Option("--msac/--no-msac", help="Override the profile's MSAC flag")]
MinTilesOpt = Annotated[Optional[int], typer.Option("--min-tiles", min=1, help="Smallest primary tile count")]
MaxTilesOpt = Annotated[Optional[int], typer.Option("--max-tiles", min=1, max=6, help="Largest tile count")]
ThumbnailOpt = Annotated[
    Optional[bool], typer.Option("--thumbnail/--no-thumbnail", help="Append the global thumbnail view")
]
ConfigOpt = Annotated[
    Optional[Path], typer.Option("--config", "-c", help="YAML file of option defaults (key: value)")
]
OutOpt = Annotated[Optional[Path], typer.Option("--out", "-o", help="Output file (stdout when omitted)")]


def tiling_config(
    settings: Settings,
    profile: Optional[str],
    msac: Optional[bool],
    min_tiles: Optional[int],
    max_tiles: Optional[int],
    thumbnail: Optional[bool],
) -> TilingConfig:
    name = settings.get("profile", profile, "2b")
    try:
        config = load_profile(str(name))
    except ValueError as e:
        raise typer.BadParameter(str(e), param_hint="--profile") from None

    overrides = {}
    for key, value in (
        ("msac", settings.get("msac", msac)),
        ("min_tiles", settings.get("min_tiles", min_tiles)),
        ("max_tiles", settings.get("max_tiles", max_tiles)),
        ("use_thumbnail", settings.get("thumbnail", thumbnail)),
    ):
        if value is not None:
            overrides[key] = value
    if "use_thumbnail" in overrides:
        overrides["msac_thumbnail"] = overrides["use_thumbnail"]
    try:
        return replace(config, **overrides)
    except ValueError as e:
        raise typer.BadParameter(str(e)) from None
