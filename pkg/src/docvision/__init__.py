"""
docvision: dynamic-resolution document vision input pipeline and evaluation.

Subpackages:
    imaging     image decode, resize, crop, normalize
    tiling      grid planning (dynamic resolution and MSAC) and tile extraction
    vision      desk-scale ViT, pixel shuffle and MLP projector forward path
    recipe      training data mixtures, manifests and stage schedules
    evaluation  document extraction and OCR scoring, inference clients, runner
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
