"""Dynamic-resolution tiling and multi-scale adaptive cropping."""

from .extract import extract_tiles
from .models import (
    MAX_TILES,
    MSAC_MIN_TILES,
    SCHEMA_VERSION,
    TILE_SIZE,
    TOKEN_RANGE_NOTE,
    TOKENS_PER_TILE,
    GridShape,
    MsacPlan,
    Plan,
    TilingConfig,
    TilingPlan,
    load_profile,
    plan_to_dict,
    token_budget,
    token_range,
)
from .planner import enumerate_grids, plan_dynamic, plan_image, plan_msac, select_grid

__all__ = [
    # Types
    "GridShape",
    "TilingConfig",
    "TilingPlan",
    "MsacPlan",
    "Plan",
    # Constants
    "TILE_SIZE",
    "TOKENS_PER_TILE",
    "MAX_TILES",
    "MSAC_MIN_TILES",
    "TOKEN_RANGE_NOTE",
    "SCHEMA_VERSION",
    # Planning
    "enumerate_grids",
    "select_grid",
    "plan_dynamic",
    "plan_msac",
    "plan_image",
    "extract_tiles",
    # Profiles and serialization
    "load_profile",
    "plan_to_dict",
    "token_budget",
    "token_range",
]
