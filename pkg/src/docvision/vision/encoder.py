"""
Desk-scale vision encoder and MLP projector.

Weights are seeded uniform draws, not trained values: the modules exist to
exercise the shapes and token budgets of the ViT-MLP-LLM bridge, so every
forward is deterministic for a given ``ModelConfig``.
"""

from __future__ import annotations

import functools
import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from .models import ModelConfig


class PatchEmbed(nn.Module):
    """Split a ``[C, H, W]`` tile into non-overlapping patches and embed each linearly."""

    def __init__(self, patch_size: int, in_channels: int, dim: int):
        super().__init__()
        self.patch_size = patch_size
        self.proj = nn.Linear(in_channels * patch_size * patch_size, dim, dtype=torch.float64)

    def forward(self, tile: torch.Tensor) -> torch.Tensor:
        p = self.patch_size
        channels, height, width = tile.shape
        # [C, H/p, W/p, p, p] -> [H/p, W/p, C, p, p]
        patches = tile.unfold(1, p, p).unfold(2, p, p).permute(1, 2, 0, 3, 4)
        patches = patches.reshape((height // p) * (width // p), channels * p * p)
        return self.proj(patches)


class Attention(nn.Module):
    def __init__(self, dim: int, heads: int):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.qkv = nn.Linear(dim, dim * 3, dtype=torch.float64)
        self.proj = nn.Linear(dim, dim, dtype=torch.float64)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        n, dim = x.shape
        qkv = self.qkv(x).view(n, 3, self.heads, self.head_dim).permute(1, 2, 0, 3)
        q, k, v = qkv[0], qkv[1], qkv[2]
        weights = torch.softmax(q @ k.transpose(-2, -1) / math.sqrt(self.head_dim), dim=-1)
        out = (weights @ v).permute(1, 0, 2).reshape(n, dim)
        return self.proj(out)


class Block(nn.Module):
    """Pre-norm transformer block: ``x + attn(ln(x))`` then ``x + mlp(ln(x))``."""

    def __init__(self, dim: int, heads: int, mlp_ratio: int):
        super().__init__()
        self.norm1 = nn.LayerNorm(dim, dtype=torch.float64)
        self.attn = Attention(dim, heads)
        self.norm2 = nn.LayerNorm(dim, dtype=torch.float64)
        self.mlp = nn.Sequential(
            nn.Linear(dim, dim * mlp_ratio, dtype=torch.float64),
            nn.GELU(),
            nn.Linear(dim * mlp_ratio, dim, dtype=torch.float64),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.norm1(x))
        return x + self.mlp(self.norm2(x))


class Projector(nn.Module):
    """Two-layer GELU MLP bridging shuffled ViT tokens to the language model width."""

    def __init__(self, in_dim: int, out_dim: int):
        super().__init__()
        self.fc1 = nn.Linear(in_dim, out_dim, dtype=torch.float64)
        self.fc2 = nn.Linear(out_dim, out_dim, dtype=torch.float64)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.fc2(F.gelu(self.fc1(x)))

    def jvp(self, x: torch.Tensor, direction: torch.Tensor) -> torch.Tensor:
        """Analytic Jacobian-vector product at ``x`` along ``direction``.

        ``d/dz gelu(z) = Phi(z) + z * phi(z)`` for the exact (erf) GELU.
        """
        z = self.fc1(x)
        cdf = 0.5 * (1.0 + torch.erf(z / math.sqrt(2.0)))
        pdf = torch.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        hidden = (cdf + z * pdf) * (direction @ self.fc1.weight.T)
        return hidden @ self.fc2.weight.T


class DeskVisionModel(nn.Module):
    """Patch embedding, transformer blocks and projector built from one ``ModelConfig``."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        self.patch_embed = PatchEmbed(cfg.patch_size, 3, cfg.vit_dim)
        self.blocks = nn.ModuleList(
            Block(cfg.vit_dim, cfg.vit_heads, cfg.mlp_ratio) for _ in range(cfg.vit_layers)
        )
        self.projector = Projector(cfg.shuffled_dim, cfg.llm_dim)
        self._init_weights(cfg.seed, cfg.init_range)

    @torch.no_grad()
    def _init_weights(self, seed: int, init_range: float) -> None:
        generator = torch.Generator().manual_seed(seed)
        for module in self.modules():
            if isinstance(module, nn.Linear):
                for param in (module.weight, module.bias):
                    draw = torch.rand(param.shape, generator=generator, dtype=torch.float64)
                    param.copy_((draw * 2.0 - 1.0) * init_range)

    def vit_parameters(self) -> list[nn.Parameter]:
        return list(self.patch_embed.parameters()) + list(self.blocks.parameters())

    def mlp_parameters(self) -> list[nn.Parameter]:
        return list(self.projector.parameters())


@functools.lru_cache(maxsize=8)
def build_model(cfg: ModelConfig) -> DeskVisionModel:
    """Return the shared, frozen model for ``cfg``; weights are immutable once built."""
    model = DeskVisionModel(cfg).eval()
    for param in model.parameters():
        param.requires_grad_(False)
    return model
