"""
Data models for tiling plans.

A ``TilingPlan`` describes one grid over a resized canvas; an ``MsacPlan``
pairs a primary grid with an optional secondary grid at a different aspect
ratio plus a global thumbnail view.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from importlib import resources
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from ..imaging.models import Box

TILE_SIZE = 448
TOKENS_PER_TILE = 256
MAX_TILES = 6
MSAC_MIN_TILES = 2

SCHEMA_VERSION = 1

TOKEN_RANGE_NOTE = (
    "bounds are tokens_per_tile times the fewest and most tiles this config can plan; "
    "the quoted 256 to 1,590 token range is not a multiple of 256 and is not reproduced"
)


@dataclass(frozen=True, order=True)
class GridShape:
    """A rows x cols tiling grid."""

    rows: int
    cols: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"grid dimensions must be >= 1, got {self.rows}x{self.cols}")

    @property
    def num_tiles(self) -> int:
        return self.rows * self.cols

    def as_dict(self) -> Dict[str, int]:
        return {"rows": self.rows, "cols": self.cols}


@dataclass(frozen=True)
class TilingConfig:
    """Planner knobs.

    Attributes:
        min_tiles: Smallest primary grid tile count
        max_tiles: Largest grid tile count, at most 6
        tile_size: Edge of a square tile in pixels
        use_thumbnail: Append a global view to multi-tile dynamic plans
        msac: Add a secondary grid at a different aspect ratio
        msac_thumbnail: Append the global view to MSAC plans
        tokens_per_tile: Visual tokens each tile contributes after compression
    """

    min_tiles: int = 1
    max_tiles: int = MAX_TILES
    tile_size: int = TILE_SIZE
    use_thumbnail: bool = True
    msac: bool = False
    msac_thumbnail: bool = True
    tokens_per_tile: int = TOKENS_PER_TILE

    def __post_init__(self) -> None:
        if not 1 <= self.min_tiles <= self.max_tiles:
            raise ValueError(
                f"tile bounds must satisfy 1 <= min_tiles <= max_tiles, got {self.min_tiles}..{self.max_tiles}"
            )
        if self.max_tiles > MAX_TILES:
            raise ValueError(f"max_tiles is capped at {MAX_TILES}, got {self.max_tiles}")
        if self.tile_size <= 0:
            raise ValueError(f"tile_size must be positive, got {self.tile_size}")
        if self.tokens_per_tile <= 0:
            raise ValueError(f"tokens_per_tile must be positive, got {self.tokens_per_tile}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TilingConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown tiling config keys: {sorted(unknown)}")
        return cls(**data)


def load_profile(name: str) -> TilingConfig:
    """
    Load a bundled model profile (``0.8b`` or ``2b``).

    The ``2b`` profile enables the secondary MSAC grid; ``0.8b`` uses plain
    dynamic resolution.
    """
    text = resources.files("docvision").joinpath("data", "profiles.yaml").read_text(encoding="utf-8")
    profiles = yaml.safe_load(text) or {}
    if name not in profiles:
        raise ValueError(f"unknown profile {name!r}; available: {sorted(profiles)}")
    return TilingConfig.from_dict(profiles[name])


@dataclass(frozen=True)
class TilingPlan:
    """One grid over a resized canvas; ``boxes`` are row-major tile boxes."""

    grid: GridShape
    tile_size: int
    resized_w: int
    resized_h: int
    boxes: Tuple[Box, ...]
    include_thumbnail: bool
    source_w: int
    source_h: int

    @property
    def num_crops(self) -> int:
        return len(self.boxes)

    @property
    def num_tiles(self) -> int:
        """Crops plus the thumbnail, when one is included."""
        return len(self.boxes) + (1 if self.include_thumbnail else 0)


@dataclass(frozen=True)
class MsacPlan:
    """Primary grid, optional secondary grid, and the thumbnail flag."""

    primary: TilingPlan
    secondary: Optional[TilingPlan]
    thumbnail: bool

    @property
    def tile_size(self) -> int:
        return self.primary.tile_size

    @property
    def source_w(self) -> int:
        return self.primary.source_w

    @property
    def source_h(self) -> int:
        return self.primary.source_h

    @property
    def num_tiles(self) -> int:
        secondary = self.secondary.num_crops if self.secondary is not None else 0
        return self.primary.num_crops + secondary + (1 if self.thumbnail else 0)


Plan = Union[TilingPlan, MsacPlan]


def token_budget(plan: Plan, tokens_per_tile: int = TOKENS_PER_TILE) -> int:
    """Visual tokens the plan produces: ``tokens_per_tile`` per tile, thumbnail included."""
    return tokens_per_tile * plan.num_tiles


def token_range(
    config: TilingConfig, msac: Optional[bool] = None, tokens_per_tile: Optional[int] = None
) -> Tuple[int, int]:
    """
    Fewest and most visual tokens a plan under ``config`` can produce.

    Dynamic plans hold one grid of ``min_tiles`` to ``max_tiles`` crops plus the
    thumbnail on multi-crop grids. MSAC plans add a secondary grid of 2 to
    ``max_tiles`` crops (none when ``max_tiles`` is 1) and the thumbnail when
    ``msac_thumbnail`` is set. With the default 6-tile limit that is 256 to
    1,792 tokens for dynamic plans and 1,024 to 3,328 for MSAC plans.
    """
    msac = config.msac if msac is None else msac
    per_tile = config.tokens_per_tile if tokens_per_tile is None else tokens_per_tile
    if msac:
        thumb = 1 if config.msac_thumbnail else 0
        has_secondary = config.max_tiles >= MSAC_MIN_TILES
        fewest = config.min_tiles + (MSAC_MIN_TILES if has_secondary else 0) + thumb
        most = config.max_tiles + (config.max_tiles if has_secondary else 0) + thumb
    else:
        fewest = config.min_tiles + (1 if config.use_thumbnail and config.min_tiles > 1 else 0)
        most = config.max_tiles + (1 if config.use_thumbnail and config.max_tiles > 1 else 0)
    return per_tile * fewest, per_tile * most


def _grid_dict(plan: TilingPlan) -> Dict[str, Any]:
    return {
        "grid": plan.grid.as_dict(),
        "resized": {"width": plan.resized_w, "height": plan.resized_h},
        "boxes": [box.as_list() for box in plan.boxes],
    }


def plan_to_dict(
    plan: Plan, tokens_per_tile: int = TOKENS_PER_TILE, config: Optional[TilingConfig] = None
) -> Dict[str, Any]:
    """
    Serialize a plan to the documented JSON schema.

    Keys: ``schema_version``, ``mode`` (``dynamic``/``msac``), ``image``,
    ``tile_size``, ``primary``, ``secondary`` (null when absent),
    ``thumbnail``, ``num_tiles``, ``token_budget`` and ``token_range``
    (``min``, ``max``, ``note``). The range comes from ``config``, or from the
    default 6-tile config when none is given.
    """
    if isinstance(plan, MsacPlan):
        mode = "msac"
        primary = _grid_dict(plan.primary)
        secondary = _grid_dict(plan.secondary) if plan.secondary is not None else None
        thumbnail = plan.thumbnail
    else:
        mode = "dynamic"
        primary = _grid_dict(plan)
        secondary = None
        thumbnail = plan.include_thumbnail
    fewest, most = token_range(config or TilingConfig(), msac=mode == "msac", tokens_per_tile=tokens_per_tile)
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": mode,
        "image": {"width": plan.source_w, "height": plan.source_h},
        "tile_size": plan.tile_size,
        "primary": primary,
        "secondary": secondary,
        "thumbnail": thumbnail,
        "num_tiles": plan.num_tiles,
        "token_budget": token_budget(plan, tokens_per_tile),
        "token_range": {"min": fewest, "max": most, "note": TOKEN_RANGE_NOTE},
    }
