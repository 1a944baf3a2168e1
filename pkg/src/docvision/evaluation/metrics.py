"""Scoring functions for document extraction and OCR. All are pure."""

from __future__ import annotations

import math
import re
import string
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence, Union

import zss

from .models import (
    DocType,
    DocTypeReport,
    EvalReport,
    ExtractionResult,
    ExtractionSample,
    JsonNode,
    NodeKind,
    OcrCategory,
    OcrReport,
    OcrResult,
    ParseResult,
    ScoreBreakdown,
)
from .trees import flatten, parse_prediction, to_tree

_PUNCT = str.maketrans("", "", string.punctuation)


def _children(node: JsonNode) -> List[JsonNode]:
    return list(node.children)


def _label(node: JsonNode) -> str:
    return node.label


def _unit_cost(a: str, b: str) -> int:
    return 0 if a == b else 1


def tree_edit_distance(a: Optional[JsonNode], b: Optional[JsonNode]) -> int:
    """
    Ordered tree edit distance with unit insert, delete and relabel costs.

    ``None`` is the empty tree.
    """
    if a is None and b is None:
        return 0
    if a is None:
        return b.size
    if b is None:
        return a.size
    return int(zss.simple_distance(a, b, get_children=_children, get_label=_label, label_dist=_unit_cost))


def _check_ground_truth(gt: Optional[JsonNode]) -> JsonNode:
    if gt is None or (gt.kind is not NodeKind.SCALAR and not gt.children):
        raise ValueError("ground truth tree is empty")
    return gt


def effective_ted_score(pred: ParseResult, gt: JsonNode) -> float:
    """``max(0, 1 - TED / max(|pred|, |gt|))``, or 0 when the prediction did not parse."""
    gt = _check_ground_truth(gt)
    if not pred.ok:
        return 0.0
    distance = tree_edit_distance(pred.tree, gt)
    return max(0.0, 1.0 - distance / max(pred.tree.size, gt.size))


def kv_f1(pred: ParseResult, gt: JsonNode) -> float:
    """F1 over exact ``(path, value)`` leaf matches."""
    gt = _check_ground_truth(gt)
    if not pred.ok:
        return 0.0
    gt_pairs = set(flatten(gt))
    pred_pairs = set(flatten(pred.tree))
    hits = len(gt_pairs & pred_pairs)
    if hits == 0:
        return 0.0
    precision = hits / len(pred_pairs)
    recall = hits / len(gt_pairs)
    return 2 * precision * recall / (precision + recall)


def perfect_match(pred: ParseResult, gt: JsonNode) -> int:
    return int(pred.ok and pred.tree == gt)


def score_prediction(raw: Optional[str], gt: JsonNode) -> ScoreBreakdown:
    parsed = parse_prediction(raw)
    return ScoreBreakdown(
        perfect_match=perfect_match(parsed, gt),
        effective_ted=effective_ted_score(parsed, gt),
        kv_f1=kv_f1(parsed, gt),
        parsed=parsed.ok,
    )


def score_sample(sample: ExtractionSample) -> ScoreBreakdown:
    """Score ``sample.raw_prediction`` against its ground truth."""
    return score_prediction(sample.raw_prediction, to_tree(sample.ground_truth))


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values)


def aggregate(results: Iterable[ExtractionResult]) -> EvalReport:
    """
    Per-document-type metric means and accuracies.

    The overall figure is the unweighted mean of the per-type accuracies.
    The result does not depend on the order of ``results``.

    Raises:
        ValueError: If there are no results
    """
    by_type: Dict[DocType, List[ScoreBreakdown]] = defaultdict(list)
    for result in results:
        by_type[result.doc_type].append(result.scores)
    if not by_type:
        raise ValueError("cannot aggregate an empty set of results")

    per_type: Dict[DocType, DocTypeReport] = {}
    for doc_type in sorted(by_type, key=lambda t: t.value):
        scores = by_type[doc_type]
        per_type[doc_type] = DocTypeReport(
            doc_type=doc_type,
            count=len(scores),
            perfect_match=_mean([s.perfect_match for s in scores]),
            effective_ted=_mean([s.effective_ted for s in scores]),
            kv_f1=_mean([s.kv_f1 for s in scores]),
            parse_rate=_mean([1.0 if s.parsed else 0.0 for s in scores]),
            errored=sum(1 for s in scores if s.errored),
        )
    overall = overall_accuracy([r.accuracy for r in per_type.values()])
    return EvalReport(per_type=per_type, overall=overall)


def overall_accuracy(accuracies: Sequence[float]) -> float:
    if not accuracies:
        raise ValueError("no accuracies to average")
    return _mean(list(accuracies))


def normalize_ocr_text(text: str, category: Optional[OcrCategory] = None) -> str:
    """
    Normalize text before containment matching.

    Handwritten math keeps case and symbols and drops all whitespace. Every
    other category is lowercased with punctuation removed and whitespace
    collapsed.
    """
    if category is OcrCategory.HMER:
        return re.sub(r"\s+", "", text)
    return " ".join(text.lower().translate(_PUNCT).split())


def ocr_text_score(
    pred: str,
    gt: Union[str, Sequence[str]],
    category: Optional[OcrCategory] = None,
) -> int:
    """1 if any normalized reference answer is contained in the normalized prediction."""
    answers = [gt] if isinstance(gt, str) else list(gt)
    prediction = normalize_ocr_text(pred or "", category)
    for answer in answers:
        reference = normalize_ocr_text(answer, category)
        if reference and reference in prediction:
            return 1
    return 0


def aggregate_ocr(results: Iterable[OcrResult]) -> OcrReport:
    correct: Dict[OcrCategory, int] = defaultdict(int)
    totals: Dict[OcrCategory, int] = defaultdict(int)
    errored = 0
    for result in results:
        totals[result.category] += 1
        correct[result.category] += result.correct
        errored += int(result.errored)
    if not totals:
        raise ValueError("cannot aggregate an empty set of OCR results")
    order = sorted(totals, key=lambda c: c.value)
    return OcrReport(
        correct={c: correct[c] for c in order},
        totals={c: totals[c] for c in order},
        errored=errored,
    )
