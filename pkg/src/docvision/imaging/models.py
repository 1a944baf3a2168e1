"""
Data models for image buffers.

An ``ImageBuffer`` is a decoded 8-bit RGB raster; a ``PixelTensor`` is the
float rendition of a buffer after per-channel normalization, ready for the
vision encoder.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
import torch

Channels = Tuple[float, float, float]

DEFAULT_MEAN: Channels = (0.485, 0.456, 0.406)
DEFAULT_STD: Channels = (0.229, 0.224, 0.225)


class ImageDecodeError(ValueError):
    """Raised when a file is not a decodable PNG or JPEG image."""


@dataclass(frozen=True)
class Box:
    """Axis-aligned pixel rectangle, origin at the top-left corner."""

    x: int
    y: int
    w: int
    h: int

    @property
    def area(self) -> int:
        return self.w * self.h

    def as_list(self) -> list[int]:
        return [self.x, self.y, self.w, self.h]


@dataclass(frozen=True, eq=False)
class ImageBuffer:
    """Decoded RGB raster stored as a read-only ``uint8`` array of shape (H, W, 3)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.dtype != np.uint8:
            raise ValueError(f"image data must be uint8, got {self.data.dtype}")
        if self.data.ndim != 3 or self.data.shape[2] != 3:
            raise ValueError(f"image data must have shape (H, W, 3), got {self.data.shape}")
        if self.data.shape[0] <= 0 or self.data.shape[1] <= 0:
            raise ValueError(f"image dimensions must be positive, got {self.data.shape[:2]}")
        if self.data.flags.writeable:
            frozen = np.ascontiguousarray(self.data).copy()
            frozen.setflags(write=False)
            object.__setattr__(self, "data", frozen)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "ImageBuffer":
        return cls(data=np.asarray(array, dtype=np.uint8))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def channels(self) -> int:
        return int(self.data.shape[2])

    @property
    def size(self) -> Tuple[int, int]:
        """(width, height), the PIL ordering."""
        return self.width, self.height

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageBuffer):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.data.shape, self.data.tobytes()))


@dataclass(frozen=True, eq=False)
class PixelTensor:
    """Normalized float64 samples of shape (H, W, C)."""

    data: np.ndarray

    def __post_init__(self) -> None:
        if self.data.ndim != 3:
            raise ValueError(f"pixel tensor must have shape (H, W, C), got {self.data.shape}")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("pixel tensor contains non-finite values")

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def channels(self) -> int:
        return int(self.data.shape[2])

    def to_tensor(self) -> torch.Tensor:
        """Return a channel-first ``[C, H, W]`` float64 tensor."""
        return torch.from_numpy(np.ascontiguousarray(self.data.transpose(2, 0, 1))).to(torch.float64)
