"""Composable tile transforms applied before the vision encoder."""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Sequence

from .models import DEFAULT_MEAN, DEFAULT_STD, ImageBuffer, PixelTensor
from .ops import normalize, resize


class Transform(ABC):
    """Map one tile buffer to another.

    Transforms take an ``ImageBuffer`` and return a (potentially modified)
    ``ImageBuffer``, so they can be chained freely.
    """

    @abstractmethod
    def __call__(self, tile: ImageBuffer) -> ImageBuffer:
        pass


class CompositeTransform(Transform):
    """Combines multiple transforms into a single transform."""

    def __init__(self, transforms: list[Transform]):
        self.transforms = transforms

    def __call__(self, tile: ImageBuffer) -> ImageBuffer:
        for transform in self.transforms:
            tile = transform(tile)
        return tile


class NullTransform(Transform):
    """Default transform that passes through unchanged."""

    def __call__(self, tile: ImageBuffer) -> ImageBuffer:
        return tile


class ResizeTransform(Transform):
    """Force a square ``size`` x ``size`` tile; a no-op for tiles already that size."""

    def __init__(self, size: int):
        if size <= 0:
            raise ValueError(f"size must be positive, got {size}")
        self.size = size

    def __call__(self, tile: ImageBuffer) -> ImageBuffer:
        return resize(tile, self.size, self.size)


class TilePreprocessor:
    """Run a transform chain, then normalize into the encoder's input space.

    Args:
        transform: Transform applied to every tile before normalization
        mean: Per-channel mean on the 0..1 scale
        std: Per-channel standard deviation on the 0..1 scale
    """

    def __init__(
        self,
        transform: Transform | None = None,
        mean: Sequence[float] = DEFAULT_MEAN,
        std: Sequence[float] = DEFAULT_STD,
    ):
        self.transform = transform or NullTransform()
        self.mean = tuple(mean)
        self.std = tuple(std)

    def __call__(self, tile: ImageBuffer) -> PixelTensor:
        return normalize(self.transform(tile), self.mean, self.std)
