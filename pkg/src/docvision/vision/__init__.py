"""Desk-scale ViT-MLP-LLM forward path."""

from .encoder import DeskVisionModel, build_model
from .freeze import apply_freeze
from .models import (
    ChatTemplate,
    ModelConfig,
    PatchTokens,
    TokenSegment,
    TokenSequence,
    VisualTokens,
    as_ratio,
)
from .pipeline import (
    encode_image,
    forward_trace,
    patch_embed,
    pixel_shuffle,
    pixel_unshuffle,
    project,
    project_jvp,
    vit_forward,
)
from .sequence import assemble_sequence, count_text_tokens

__all__ = [
    # Types
    "ModelConfig",
    "PatchTokens",
    "VisualTokens",
    "ChatTemplate",
    "TokenSegment",
    "TokenSequence",
    "as_ratio",
    # Model
    "DeskVisionModel",
    "build_model",
    "apply_freeze",
    # Operations
    "patch_embed",
    "vit_forward",
    "pixel_shuffle",
    "pixel_unshuffle",
    "project",
    "project_jvp",
    "encode_image",
    "forward_trace",
    "assemble_sequence",
    "count_text_tokens",
]
