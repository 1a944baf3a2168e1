"""
Data models for the desk-scale ViT-MLP-LLM forward path.

Token blocks carry ``torch.Tensor`` payloads (float64) in the same way chat
observations carry token tensors; shape bookkeeping lives on the dataclasses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Literal, Tuple, Union

import torch
import yaml

from ..imaging.models import DEFAULT_MEAN, DEFAULT_STD

RatioLike = Union[Fraction, float, int, str]


def as_ratio(value: RatioLike) -> Fraction:
    """Coerce ``value`` to a spatial downscale ratio of the form ``1/k``."""
    if isinstance(value, float):
        ratio = Fraction(value).limit_denominator(1024)
    else:
        ratio = Fraction(value)
    if ratio <= 0 or ratio > 1 or ratio.numerator != 1:
        raise ValueError(f"shuffle ratio must be 1/k for a positive integer k, got {value}")
    return ratio


@dataclass(frozen=True)
class ModelConfig:
    """Geometry and seed of the desk-scale vision path.

    ``patch_size`` 14 is the only patching for which a 448px tile yields a
    32x32 grid that a 1/2 pixel shuffle compresses to 256 tokens.

    Attributes:
        tile_size: Edge of an encoder input tile in pixels
        patch_size: Edge of a ViT patch in pixels
        vit_dim: Width of ViT tokens
        vit_layers: Number of pre-norm transformer blocks
        vit_heads: Attention heads per block
        mlp_ratio: Hidden width multiplier of the block MLPs
        llm_dim: Width of projected visual tokens
        shuffle_ratio: Spatial downscale of the pixel shuffle
        seed: Seed of the uniform weight initialization
        init_range: Half-width of the uniform weight initialization
        mean: Per-channel normalization mean
        std: Per-channel normalization std
    """

    tile_size: int = 448
    patch_size: int = 14
    vit_dim: int = 64
    vit_layers: int = 2
    vit_heads: int = 4
    mlp_ratio: int = 4
    llm_dim: int = 128
    shuffle_ratio: Fraction = Fraction(1, 2)
    seed: int = 0
    init_range: float = 0.02
    mean: Tuple[float, float, float] = DEFAULT_MEAN
    std: Tuple[float, float, float] = DEFAULT_STD

    def __post_init__(self) -> None:
        object.__setattr__(self, "shuffle_ratio", as_ratio(self.shuffle_ratio))
        object.__setattr__(self, "mean", tuple(float(v) for v in self.mean))
        object.__setattr__(self, "std", tuple(float(v) for v in self.std))
        if self.patch_size <= 0 or self.tile_size % self.patch_size != 0:
            raise ValueError(f"tile_size {self.tile_size} is not divisible by patch_size {self.patch_size}")
        if self.patch_grid % self.shuffle_factor != 0:
            raise ValueError(
                f"patch grid {self.patch_grid} is not divisible by shuffle factor {self.shuffle_factor}"
            )
        if self.vit_heads <= 0 or self.vit_dim % self.vit_heads != 0:
            raise ValueError(f"vit_dim {self.vit_dim} is not divisible by vit_heads {self.vit_heads}")
        if self.vit_layers < 0:
            raise ValueError(f"vit_layers must be >= 0, got {self.vit_layers}")
        if self.llm_dim <= 0 or self.vit_dim <= 0 or self.mlp_ratio <= 0:
            raise ValueError("vit_dim, llm_dim and mlp_ratio must be positive")

    @property
    def patch_grid(self) -> int:
        """Patches along one tile edge."""
        return self.tile_size // self.patch_size

    @property
    def shuffle_factor(self) -> int:
        """Inverse of ``shuffle_ratio``: input tokens merged along each axis."""
        return self.shuffle_ratio.denominator

    @property
    def shuffled_dim(self) -> int:
        return self.vit_dim * self.shuffle_factor**2

    @property
    def tokens_per_tile(self) -> int:
        return (self.patch_grid // self.shuffle_factor) ** 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            "tile_size": self.tile_size,
            "patch_size": self.patch_size,
            "vit_dim": self.vit_dim,
            "vit_layers": self.vit_layers,
            "vit_heads": self.vit_heads,
            "mlp_ratio": self.mlp_ratio,
            "llm_dim": self.llm_dim,
            "shuffle_ratio": str(self.shuffle_ratio),
            "seed": self.seed,
            "init_range": self.init_range,
            "mean": list(self.mean),
            "std": list(self.std),
        }


@dataclass(frozen=True, eq=False)
class PatchTokens:
    """A ``grid_h`` x ``grid_w`` token grid stored row-major as ``[grid_h * grid_w, dim]``."""

    grid_h: int
    grid_w: int
    data: torch.Tensor

    def __post_init__(self) -> None:
        if self.data.ndim != 2 or self.data.shape[0] != self.grid_h * self.grid_w:
            raise ValueError(
                f"token data of shape {tuple(self.data.shape)} does not match grid {self.grid_h}x{self.grid_w}"
            )

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])

    @property
    def num_tokens(self) -> int:
        return self.grid_h * self.grid_w


@dataclass(frozen=True, eq=False)
class VisualTokens:
    """Projected token block handed to the language model, ``[num_tokens, dim]``."""

    data: torch.Tensor

    @property
    def num_tokens(self) -> int:
        return int(self.data.shape[0])

    @property
    def dim(self) -> int:
        return int(self.data.shape[1])


@dataclass(frozen=True)
class ChatTemplate:
    """Prompt layout around image placeholders.

    Every marker counts as one token; text is counted by whitespace-separated
    words, since no natural-text tokenizer is involved.
    """

    system: str = ""
    user_prefix: str = ""
    image_start: str = ""
    image_end: str = ""
    image_context: str = ""

    def is_empty(self) -> bool:
        return not any((self.system, self.user_prefix, self.image_start, self.image_end, self.image_context))

    @classmethod
    def from_yaml(cls, path: Union[str, Path]) -> "ChatTemplate":
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(data, dict):
            raise ValueError(f"chat template {path} must be a YAML mapping")
        return cls(**{key: str(value) for key, value in data.items()})

    @classmethod
    def default(cls) -> "ChatTemplate":
        """The bundled template shipped in ``docvision/data/chat_template.yaml``."""
        with resources.as_file(resources.files("docvision").joinpath("data", "chat_template.yaml")) as path:
            return cls.from_yaml(path)


SegmentKind = Literal["text", "image"]


@dataclass(frozen=True)
class TokenSegment:
    kind: SegmentKind
    count: int
    payload: str


@dataclass(frozen=True)
class TokenSequence:
    """Ordered text and image segments forming the language model input."""

    segments: Tuple[TokenSegment, ...] = field(default_factory=tuple)

    @property
    def total_visual_tokens(self) -> int:
        return sum(s.count for s in self.segments if s.kind == "image")

    @property
    def total_tokens(self) -> int:
        return sum(s.count for s in self.segments)

    def to_dict(self) -> Dict[str, Any]:
        segments: List[Dict[str, Any]] = [
            {"kind": s.kind, "count": s.count, "payload": s.payload} for s in self.segments
        ]
        return {
            "segments": segments,
            "total_visual_tokens": self.total_visual_tokens,
            "total_tokens": self.total_tokens,
        }

    def serialize(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
