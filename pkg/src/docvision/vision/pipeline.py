"""
Forward path from tiles to visual token blocks.

Each tile flows through patch embedding, the transformer blocks, a
space-to-depth pixel shuffle (1024 tokens -> 256 at the default geometry) and
the MLP projector. A plan's tiles are independent, so ``encode_image`` can
fan them out over a thread pool; results keep plan order.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import torch

from ..imaging.models import ImageBuffer, PixelTensor
from ..imaging.transforms import CompositeTransform, ResizeTransform, TilePreprocessor
from ..tiling.extract import extract_tiles
from ..tiling.models import SCHEMA_VERSION, Plan, TilingConfig, plan_to_dict
from .encoder import build_model
from .models import ChatTemplate, ModelConfig, PatchTokens, RatioLike, TokenSequence, VisualTokens, as_ratio
from .sequence import assemble_sequence

logger = logging.getLogger(__name__)

CHECKSUM_PRECISION = 6


def patch_embed(tile: PixelTensor, cfg: ModelConfig) -> PatchTokens:
    """Embed a normalized ``tile_size`` x ``tile_size`` x 3 tile into a patch token grid."""
    expected = (cfg.tile_size, cfg.tile_size, 3)
    if tuple(tile.data.shape) != expected:
        raise ValueError(f"tile must have shape {expected}, got {tuple(tile.data.shape)}")
    model = build_model(cfg)
    with torch.no_grad():
        data = model.patch_embed(tile.to_tensor())
    return PatchTokens(grid_h=cfg.patch_grid, grid_w=cfg.patch_grid, data=data)


def vit_forward(tokens: PatchTokens, cfg: ModelConfig) -> PatchTokens:
    """Run the transformer blocks; a zero-layer config is the identity."""
    if (tokens.grid_h, tokens.grid_w, tokens.dim) != (cfg.patch_grid, cfg.patch_grid, cfg.vit_dim):
        raise ValueError(
            f"expected a {cfg.patch_grid}x{cfg.patch_grid}x{cfg.vit_dim} token grid, "
            f"got {tokens.grid_h}x{tokens.grid_w}x{tokens.dim}"
        )
    model = build_model(cfg)
    x = tokens.data
    with torch.no_grad():
        for block in model.blocks:
            x = block(x)
    return PatchTokens(grid_h=tokens.grid_h, grid_w=tokens.grid_w, data=x)


def _shuffle_factor(tokens: PatchTokens, ratio: RatioLike) -> int:
    factor = as_ratio(ratio).denominator
    if tokens.grid_h % factor or tokens.grid_w % factor:
        raise ValueError(f"grid {tokens.grid_h}x{tokens.grid_w} is not divisible by shuffle factor {factor}")
    return factor


def pixel_shuffle(tokens: PatchTokens, ratio: RatioLike) -> PatchTokens:
    """
    Space-to-depth: merge each ``k x k`` block of tokens into one token.

    With ``ratio = 1/k`` the grid shrinks by ``k`` along each axis and the
    width grows by ``k**2``. Each output token concatenates its block in
    row-major (row, col) order, so scalar values are only rearranged.
    """
    k = _shuffle_factor(tokens, ratio)
    if k == 1:
        return tokens
    h, w, d = tokens.grid_h, tokens.grid_w, tokens.dim
    blocks = tokens.data.reshape(h // k, k, w // k, k, d).permute(0, 2, 1, 3, 4)
    return PatchTokens(grid_h=h // k, grid_w=w // k, data=blocks.reshape((h // k) * (w // k), k * k * d))


def pixel_unshuffle(tokens: PatchTokens, ratio: RatioLike) -> PatchTokens:
    """Exact inverse of ``pixel_shuffle`` for the same ``ratio``."""
    k = as_ratio(ratio).denominator
    if k == 1:
        return tokens
    if tokens.dim % (k * k):
        raise ValueError(f"token width {tokens.dim} is not divisible by {k * k}")
    h, w, d = tokens.grid_h, tokens.grid_w, tokens.dim // (k * k)
    grid = tokens.data.reshape(h, w, k, k, d).permute(0, 2, 1, 3, 4)
    return PatchTokens(grid_h=h * k, grid_w=w * k, data=grid.reshape(h * k * w * k, d))


def project(tokens: PatchTokens, cfg: ModelConfig) -> VisualTokens:
    """Map shuffled tokens to ``llm_dim`` through the MLP projector; token count is kept."""
    if tokens.dim != cfg.shuffled_dim:
        raise ValueError(f"projector expects width {cfg.shuffled_dim}, got {tokens.dim}")
    with torch.no_grad():
        data = build_model(cfg).projector(tokens.data)
    return VisualTokens(data=data)


def project_jvp(tokens: PatchTokens, direction: torch.Tensor, cfg: ModelConfig) -> torch.Tensor:
    """Analytic directional derivative of ``project`` at ``tokens`` along ``direction``."""
    if tokens.dim != cfg.shuffled_dim:
        raise ValueError(f"projector expects width {cfg.shuffled_dim}, got {tokens.dim}")
    if direction.shape != tokens.data.shape:
        raise ValueError(f"direction shape {tuple(direction.shape)} != tokens {tuple(tokens.data.shape)}")
    with torch.no_grad():
        return build_model(cfg).projector.jvp(tokens.data, direction.to(torch.float64))


@dataclass(frozen=True)
class TileTrace:
    """Per-stage shapes and a checksum for one encoded tile."""

    index: int
    stages: Dict[str, Tuple[int, ...]]
    checksum: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "stages": {name: list(shape) for name, shape in self.stages.items()},
            "checksum": f"{self.checksum:.{CHECKSUM_PRECISION}f}",
        }


def _preprocessor(cfg: ModelConfig) -> TilePreprocessor:
    return TilePreprocessor(CompositeTransform([ResizeTransform(cfg.tile_size)]), cfg.mean, cfg.std)


def _encode_tile(index: int, tile: ImageBuffer, cfg: ModelConfig) -> Tuple[VisualTokens, TileTrace]:
    pixels = _preprocessor(cfg)(tile)
    embedded = patch_embed(pixels, cfg)
    encoded = vit_forward(embedded, cfg)
    shuffled = pixel_shuffle(encoded, cfg.shuffle_ratio)
    projected = project(shuffled, cfg)
    trace = TileTrace(
        index=index,
        stages={
            "tile": tuple(pixels.data.shape),
            "patch_embed": tuple(embedded.data.shape),
            "vit": tuple(encoded.data.shape),
            "pixel_shuffle": tuple(shuffled.data.shape),
            "projector": tuple(projected.data.shape),
        },
        checksum=float(projected.data.sum()),
    )
    return projected, trace


def _encode_all(
    img: ImageBuffer, plan: Plan, cfg: ModelConfig, jobs: int
) -> List[Tuple[VisualTokens, TileTrace]]:
    if plan.tile_size != cfg.tile_size:
        raise ValueError(f"plan tile size {plan.tile_size} != model tile size {cfg.tile_size}")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")
    tiles = extract_tiles(img, plan)
    logger.info("Encoding %d tiles with %d worker(s)", len(tiles), jobs)
    build_model(cfg)
    if jobs == 1:
        return [_encode_tile(i, tile, cfg) for i, tile in enumerate(tiles)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(lambda item: _encode_tile(item[0], item[1], cfg), enumerate(tiles)))


def encode_image(img: ImageBuffer, plan: Plan, cfg: Optional[ModelConfig] = None, jobs: int = 1) -> List[VisualTokens]:
    """Encode every tile of ``plan`` (thumbnail included) into one token block each, in plan order."""
    cfg = cfg or ModelConfig()
    return [tokens for tokens, _ in _encode_all(img, plan, cfg, jobs)]


def forward_trace(
    img: ImageBuffer,
    plan: Plan,
    cfg: Optional[ModelConfig] = None,
    prompt: str = "",
    template: Optional[ChatTemplate] = None,
    jobs: int = 1,
    tiling: Optional[TilingConfig] = None,
) -> Dict[str, Any]:
    """
    Run the full forward path and report shapes, token counts and checksums.

    Floats are rendered at fixed precision so traces diff cleanly. ``tiling``
    is the config the plan came from; it sets the token range in the plan echo.
    """
    cfg = cfg or ModelConfig()
    template = template or ChatTemplate.default()
    encoded = _encode_all(img, plan, cfg, jobs)
    blocks = [tokens for tokens, _ in encoded]
    sequence: TokenSequence = assemble_sequence(blocks, prompt, template)
    return {
        "schema_version": SCHEMA_VERSION,
        "model": cfg.to_dict(),
        "plan": plan_to_dict(plan, cfg.tokens_per_tile, tiling),
        "tiles": [trace.to_dict() for _, trace in encoded],
        "sequence": {
            "segments": len(sequence.segments),
            "total_visual_tokens": sequence.total_visual_tokens,
            "total_tokens": sequence.total_tokens,
        },
        "checksum": f"{sum(trace.checksum for _, trace in encoded):.{CHECKSUM_PRECISION}f}",
    }
