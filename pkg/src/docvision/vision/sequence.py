"""Prompt-sequence assembly around visual token blocks."""

from __future__ import annotations

from typing import List, Sequence

from .models import ChatTemplate, TokenSegment, TokenSequence, VisualTokens


def count_text_tokens(text: str) -> int:
    """Declared token count of a text segment: its whitespace-separated words."""
    return len(text.split())


def _text(payload: str) -> TokenSegment:
    return TokenSegment(kind="text", count=count_text_tokens(payload), payload=payload)


def _marker(payload: str) -> TokenSegment:
    return TokenSegment(kind="text", count=1, payload=payload)


def assemble_sequence(
    blocks: Sequence[VisualTokens],
    prompt: str,
    template: ChatTemplate | None,
) -> TokenSequence:
    """
    Lay out ``[system][<start> image <end> ...][user prompt]``.

    Text is whitespace-normalized (runs of whitespace collapse to one space)
    so the serialized sequence is stable. Empty text segments are omitted.

    Raises:
        ValueError: If the template is missing or empty, or image markers are
            absent while blocks are present.
    """
    if template is None or template.is_empty():
        raise ValueError("chat template is empty")
    if blocks and not (template.image_start and template.image_end):
        raise ValueError("chat template needs image_start and image_end markers to place image blocks")

    segments: List[TokenSegment] = []
    system = " ".join(template.system.split())
    if system:
        segments.append(_text(system))
    for block in blocks:
        if block.num_tokens <= 0:
            raise ValueError("visual token block is empty")
        segments.append(_marker(template.image_start))
        segments.append(TokenSegment(kind="image", count=block.num_tokens, payload=template.image_context))
        segments.append(_marker(template.image_end))
    user = " ".join(f"{template.user_prefix} {prompt}".split())
    if user:
        segments.append(_text(user))
    return TokenSequence(segments=tuple(segments))
