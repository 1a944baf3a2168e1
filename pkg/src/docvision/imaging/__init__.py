"""Image decoding, resizing, cropping and normalization primitives."""

from .models import DEFAULT_MEAN, DEFAULT_STD, Box, ImageBuffer, ImageDecodeError, PixelTensor
from .ops import crop, denormalize, load_image, normalize, resize, save_image
from .transforms import (
    CompositeTransform,
    NullTransform,
    ResizeTransform,
    TilePreprocessor,
    Transform,
)

__all__ = [
    # Types
    "Box",
    "ImageBuffer",
    "PixelTensor",
    "ImageDecodeError",
    "DEFAULT_MEAN",
    "DEFAULT_STD",
    # Operations
    "load_image",
    "save_image",
    "resize",
    "crop",
    "normalize",
    "denormalize",
    # Transforms
    "Transform",
    "CompositeTransform",
    "NullTransform",
    "ResizeTransform",
    "TilePreprocessor",
]
