"""
Image primitives: decoding, bilinear resizing, cropping and normalization.

Every function here is pure: inputs are never mutated and outputs are fresh
immutable buffers, so they can be called from any number of threads.
"""

from __future__ import annotations

import io
import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image

from .models import DEFAULT_MEAN, DEFAULT_STD, Box, ImageBuffer, ImageDecodeError, PixelTensor

logger = logging.getLogger(__name__)

SUPPORTED_FORMATS = frozenset({"PNG", "JPEG"})

PathLike = Union[str, Path]


def _to_rgb(image: Image.Image) -> Image.Image:
    """Bring any PIL mode to 8-bit RGB, dropping alpha and expanding palettes."""
    if image.mode.startswith("I;16"):
        wide = np.asarray(image, dtype=np.uint16)
        image = Image.fromarray((wide >> 8).astype(np.uint8), mode="L")
    if image.mode == "P":
        image = image.convert("RGBA")
    if image.mode != "RGB":
        image = image.convert("RGB")
    return image


def load_image(path: PathLike) -> ImageBuffer:
    """
    Decode a PNG or JPEG file into an RGB ``ImageBuffer``.

    Grayscale inputs are replicated to three channels, alpha is dropped and
    palette images are expanded.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        OSError: If the file cannot be read.
        ImageDecodeError: If the bytes are not a supported, intact image.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Image file not found: {path}")
    raw = path.read_bytes()

    try:
        with Image.open(io.BytesIO(raw)) as image:
            if image.format not in SUPPORTED_FORMATS:
                raise ImageDecodeError(
                    f"Unsupported image format {image.format!r} in {path}; expected PNG or JPEG"
                )
            image.load()
            rgb = _to_rgb(image)
            array = np.asarray(rgb, dtype=np.uint8)
    except ImageDecodeError:
        raise
    except Exception as e:
        raise ImageDecodeError(f"Failed to decode image {path}: {e}") from e

    logger.debug("Loaded %s (%dx%d)", path, array.shape[1], array.shape[0])
    return ImageBuffer.from_array(array)


def save_image(img: ImageBuffer, path: PathLike) -> Path:
    """Write ``img`` as a PNG file and return the path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(np.array(img.data), mode="RGB").save(path, format="PNG")
    return path


def resize(img: ImageBuffer, target_w: int, target_h: int) -> ImageBuffer:
    """
    Bilinearly resample ``img`` to exactly ``(target_w, target_h)``.

    Uses half-pixel centers (``align_corners=False``) without antialiasing, so a
    constant field stays constant and same-size targets return the input.
    """
    if target_w <= 0 or target_h <= 0:
        raise ValueError(f"resize target must be positive, got {target_w}x{target_h}")
    if (target_w, target_h) == img.size:
        return img

    source = torch.from_numpy(np.array(img.data, dtype=np.float64)).permute(2, 0, 1).unsqueeze(0)
    resampled = F.interpolate(
        source,
        size=(target_h, target_w),
        mode="bilinear",
        align_corners=False,
    )
    pixels = resampled.squeeze(0).permute(1, 2, 0).round().clamp(0, 255)
    return ImageBuffer.from_array(pixels.to(torch.uint8).numpy())


def crop(img: ImageBuffer, box: Box) -> ImageBuffer:
    """Return exactly the pixels inside ``box``; the box must lie within the image."""
    if box.w <= 0 or box.h <= 0:
        raise ValueError(f"crop box must be non-empty, got {box}")
    if box.x < 0 or box.y < 0 or box.x + box.w > img.width or box.y + box.h > img.height:
        raise ValueError(f"crop box {box} exceeds image bounds {img.width}x{img.height}")
    return ImageBuffer(data=img.data[box.y : box.y + box.h, box.x : box.x + box.w])


def _channel_stats(values: Sequence[float], name: str) -> np.ndarray:
    stats = np.asarray(values, dtype=np.float64)
    if stats.shape != (3,):
        raise ValueError(f"{name} must have exactly 3 components, got {len(values)}")
    return stats


def normalize(
    img: ImageBuffer,
    mean: Sequence[float] = DEFAULT_MEAN,
    std: Sequence[float] = DEFAULT_STD,
) -> PixelTensor:
    """Map each channel through ``(x / 255 - mean_c) / std_c``."""
    mean_arr = _channel_stats(mean, "mean")
    std_arr = _channel_stats(std, "std")
    if np.any(std_arr == 0):
        raise ValueError(f"std components must be nonzero, got {tuple(std)}")
    scaled = img.data.astype(np.float64) / 255.0
    return PixelTensor(data=(scaled - mean_arr) / std_arr)


def denormalize(
    tensor: PixelTensor,
    mean: Sequence[float] = DEFAULT_MEAN,
    std: Sequence[float] = DEFAULT_STD,
) -> np.ndarray:
    """Invert ``normalize``; returns float samples on the 0..255 scale."""
    mean_arr = _channel_stats(mean, "mean")
    std_arr = _channel_stats(std, "std")
    return (tensor.data * std_arr + mean_arr) * 255.0
