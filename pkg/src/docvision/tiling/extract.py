"""Cut an image into the tiles a plan describes."""

from __future__ import annotations

from typing import List

from ..imaging.models import ImageBuffer
from ..imaging.ops import crop, resize
from .models import MsacPlan, Plan, TilingPlan


def _grid_tiles(img: ImageBuffer, plan: TilingPlan) -> List[ImageBuffer]:
    canvas = resize(img, plan.resized_w, plan.resized_h)
    return [crop(canvas, box) for box in plan.boxes]


def _thumbnail(img: ImageBuffer, tile_size: int) -> ImageBuffer:
    return resize(img, tile_size, tile_size)


def extract_tiles(img: ImageBuffer, plan: Plan) -> List[ImageBuffer]:
    """
    Materialize every tile of ``plan`` in plan order.

    Order: primary tiles row-major, then secondary tiles row-major (MSAC
    only), then the thumbnail, a resize of the original image.

    Raises:
        ValueError: If the plan was computed for different image dimensions.
    """
    if img.size != (plan.source_w, plan.source_h):
        raise ValueError(
            f"plan was made for {plan.source_w}x{plan.source_h}, image is {img.width}x{img.height}"
        )

    if isinstance(plan, MsacPlan):
        tiles = _grid_tiles(img, plan.primary)
        if plan.secondary is not None:
            tiles.extend(_grid_tiles(img, plan.secondary))
        if plan.thumbnail:
            tiles.append(_thumbnail(img, plan.tile_size))
        return tiles

    tiles = _grid_tiles(img, plan)
    if plan.include_thumbnail:
        tiles.append(_thumbnail(img, plan.tile_size))
    return tiles
