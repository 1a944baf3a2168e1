"""Canonical JSON trees: normalization, parsing of model output, flattening."""

from __future__ import annotations

import json
import math
import re
from typing import Any, List, Optional, Tuple

from .models import JsonNode, NodeKind, ParseResult

ROOT_KEY = "$"

_FENCE = re.compile(r"```[A-Za-z0-9_-]*[ \t]*\n?(.*?)```", re.DOTALL)
_decoder = json.JSONDecoder()


def _scalar(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isfinite(value) and value.is_integer():
            return str(int(value))
        return repr(value)
    return str(value).strip()


def canonicalize(value: Any) -> Any:
    """
    Canonical form of a JSON value.

    Object keys are sorted, scalars become trimmed strings and numbers are
    rendered canonically (``5.0`` becomes ``"5"``). Idempotent.
    """
    if isinstance(value, dict):
        return {str(k): canonicalize(value[k]) for k in sorted(value, key=str)}
    if isinstance(value, (list, tuple)):
        return [canonicalize(v) for v in value]
    return _scalar(value)


def build_tree(value: Any, key: str = ROOT_KEY) -> JsonNode:
    """Build the labeled tree of an already canonical value."""
    if isinstance(value, dict):
        return JsonNode(
            key=key,
            kind=NodeKind.OBJECT,
            children=tuple(build_tree(value[k], k) for k in sorted(value)),
        )
    if isinstance(value, list):
        return JsonNode(
            key=key,
            kind=NodeKind.ARRAY,
            children=tuple(build_tree(v, f"[{i}]") for i, v in enumerate(value)),
        )
    return JsonNode(key=key, kind=NodeKind.SCALAR, value=_scalar(value))


def to_tree(value: Any) -> JsonNode:
    return build_tree(canonicalize(value))


def _candidates(raw: str) -> List[str]:
    texts = [m.group(1) for m in _FENCE.finditer(raw)]
    texts.append(raw)
    return texts


def _first_container(text: str) -> Optional[Any]:
    for match in re.finditer(r"[\[{]", text):
        try:
            value, _ = _decoder.raw_decode(text, match.start())
        except json.JSONDecodeError:
            continue
        if isinstance(value, (dict, list)):
            return value
    return None


def parse_prediction(raw: Optional[str]) -> ParseResult:
    """
    Read the first JSON object or array out of a model's raw text.

    Markdown code fences are searched first, then the whole text; prose
    around the JSON is ignored. Never raises.
    """
    if raw is None or not raw.strip():
        return ParseResult.failure("empty prediction")
    for text in _candidates(raw):
        value = _first_container(text)
        if value is not None:
            canonical = canonicalize(value)
            return ParseResult(tree=build_tree(canonical), value=canonical)
    return ParseResult.failure("no JSON object or array found")


def flatten(node: JsonNode) -> List[Tuple[Tuple[str, ...], str]]:
    """
    ``(path, value)`` pairs for every leaf below the root.

    Empty objects and arrays count as leaves with value ``{}`` / ``[]``.
    """
    pairs: List[Tuple[Tuple[str, ...], str]] = []

    def visit(n: JsonNode, path: Tuple[str, ...]) -> None:
        if n.kind is NodeKind.SCALAR:
            pairs.append((path, n.value or ""))
        elif not n.children:
            pairs.append((path, "{}" if n.kind is NodeKind.OBJECT else "[]"))
        else:
            for child in n.children:
                visit(child, path + (child.key,))

    visit(node, ())
    return pairs
