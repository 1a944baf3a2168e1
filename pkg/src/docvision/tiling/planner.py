"""
Dynamic-resolution grid selection and multi-scale adaptive cropping (MSAC).

The grid whose aspect ratio is closest to the image's wins; exact ties go to
the later (larger) candidate only when the image covers more than half of that
candidate's canvas. Aspect ratios are compared as exact fractions so ties are
real ties, independent of floating point rounding.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import List, Sequence

from ..imaging.models import Box
from .models import MSAC_MIN_TILES, GridShape, MsacPlan, Plan, TilingConfig, TilingPlan

logger = logging.getLogger(__name__)


def enumerate_grids(min_tiles: int, max_tiles: int) -> List[GridShape]:
    """
    List every grid with ``min_tiles <= rows * cols <= max_tiles``.

    Order is ascending tile count, then ascending rows.

    Example:
        >>> [(g.rows, g.cols) for g in enumerate_grids(1, 2)]
        [(1, 1), (1, 2), (2, 1)]
    """
    if min_tiles < 1:
        raise ValueError(f"min_tiles must be >= 1, got {min_tiles}")
    if min_tiles > max_tiles:
        raise ValueError(f"min_tiles ({min_tiles}) exceeds max_tiles ({max_tiles})")
    grids = [
        GridShape(rows=r, cols=c)
        for r in range(1, max_tiles + 1)
        for c in range(1, max_tiles + 1)
        if min_tiles <= r * c <= max_tiles
    ]
    return sorted(grids, key=lambda g: (g.num_tiles, g.rows))


def _ratio_distance(aspect_ratio: Fraction, grid: GridShape) -> Fraction:
    return abs(aspect_ratio - Fraction(grid.cols, grid.rows))


def select_grid(
    img_w: int,
    img_h: int,
    candidates: Sequence[GridShape],
    tile_size: int,
) -> GridShape:
    """Pick the candidate whose cols/rows ratio is closest to ``img_w / img_h``."""
    if not candidates:
        raise ValueError("candidate grid list is empty")
    if img_w <= 0 or img_h <= 0:
        raise ValueError(f"image dimensions must be positive, got {img_w}x{img_h}")

    aspect_ratio = Fraction(img_w, img_h)
    area = img_w * img_h
    best = candidates[0]
    best_diff = _ratio_distance(aspect_ratio, best)
    for grid in candidates[1:]:
        diff = _ratio_distance(aspect_ratio, grid)
        if diff < best_diff:
            best, best_diff = grid, diff
        elif diff == best_diff and area > 0.5 * tile_size * tile_size * grid.rows * grid.cols:
            best = grid
    return best


def _layout(img_w: int, img_h: int, grid: GridShape, tile_size: int, include_thumbnail: bool) -> TilingPlan:
    boxes = tuple(
        Box(x=c * tile_size, y=r * tile_size, w=tile_size, h=tile_size)
        for r in range(grid.rows)
        for c in range(grid.cols)
    )
    return TilingPlan(
        grid=grid,
        tile_size=tile_size,
        resized_w=grid.cols * tile_size,
        resized_h=grid.rows * tile_size,
        boxes=boxes,
        include_thumbnail=include_thumbnail,
        source_w=img_w,
        source_h=img_h,
    )


def plan_dynamic(img_w: int, img_h: int, config: TilingConfig | None = None) -> TilingPlan:
    """
    Plan a single-grid tiling.

    A single-tile plan never carries a thumbnail, since the thumbnail would
    duplicate the only tile.
    """
    config = config or TilingConfig()
    candidates = enumerate_grids(config.min_tiles, config.max_tiles)
    grid = select_grid(img_w, img_h, candidates, config.tile_size)
    include_thumbnail = config.use_thumbnail and grid.num_tiles > 1
    return _layout(img_w, img_h, grid, config.tile_size, include_thumbnail)


def plan_msac(img_w: int, img_h: int, config: TilingConfig | None = None) -> MsacPlan:
    """
    Plan a multi-scale tiling: the dynamic grid plus a secondary grid.

    The secondary grid is the closest-ratio candidate with 2 to ``max_tiles``
    tiles whose aspect ratio differs from the primary's. Distinctness is by
    ratio, not by shape: a 1x1 primary also rules out 2x2. A square 448x448
    image therefore gets a 3x2 secondary grid rather than 1x2 or 2x1. The
    secondary grid is absent when no candidate remains.
    """
    config = config or TilingConfig()
    primary_grid = plan_dynamic(img_w, img_h, config).grid
    primary = _layout(img_w, img_h, primary_grid, config.tile_size, False)

    secondary = None
    if config.max_tiles >= MSAC_MIN_TILES:
        primary_ratio = Fraction(primary_grid.cols, primary_grid.rows)
        pool = [
            g
            for g in enumerate_grids(MSAC_MIN_TILES, config.max_tiles)
            if Fraction(g.cols, g.rows) != primary_ratio
        ]
        if pool:
            grid = select_grid(img_w, img_h, pool, config.tile_size)
            secondary = _layout(img_w, img_h, grid, config.tile_size, False)

    plan = MsacPlan(primary=primary, secondary=secondary, thumbnail=config.msac_thumbnail)
    logger.debug(
        "MSAC plan for %dx%d: primary=%s secondary=%s tiles=%d",
        img_w,
        img_h,
        primary_grid,
        secondary.grid if secondary is not None else None,
        plan.num_tiles,
    )
    return plan


def plan_image(img_w: int, img_h: int, config: TilingConfig | None = None) -> Plan:
    """Dispatch to ``plan_msac`` or ``plan_dynamic`` according to ``config.msac``."""
    config = config or TilingConfig()
    if config.msac:
        return plan_msac(img_w, img_h, config)
    return plan_dynamic(img_w, img_h, config)
