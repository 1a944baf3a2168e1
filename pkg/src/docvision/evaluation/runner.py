"""
Evaluation runner: loads an eval set, queries a client, scores and persists results.

Eval set (JSON lines), one sample per line::

    {"id": "r-001", "doc_type": "receipt", "prompt": "...", "images": ["r-001.png"],
     "ground_truth": {"total": "5.00"}}
    {"id": "o-001", "kind": "ocr", "category": "text_recognition", "prompt": "...",
     "images": ["o-001.png"], "answers": ["STOP"]}

Image paths are resolved relative to the eval set file.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

from docvision.io import atomic_write

from .clients import InferenceClient
from .metrics import aggregate, aggregate_ocr, ocr_text_score, score_prediction
from .models import (
    DocType,
    EvalOutcome,
    EvalSetError,
    ExtractionResult,
    ExtractionSample,
    InferenceError,
    NodeKind,
    OcrCategory,
    OcrResult,
    OcrSample,
    ScoreBreakdown,
)
from .trees import to_tree

logger = logging.getLogger(__name__)

Sample = Union[ExtractionSample, OcrSample]
Result = Union[ExtractionResult, OcrResult]

KIND_EXTRACTION = "extraction"
KIND_OCR = "ocr"


def _require(record: Dict[str, Any], key: str, where: str) -> Any:
    if key not in record:
        raise EvalSetError(f"{where}: missing field {key!r}")
    return record[key]


def _parse_sample(record: Any, base_dir: Path, where: str) -> Sample:
    if not isinstance(record, dict):
        raise EvalSetError(f"{where}: expected a JSON object")
    sample_id = str(_require(record, "id", where))
    if not sample_id or "/" in sample_id or "\\" in sample_id:
        raise EvalSetError(f"{where}: invalid sample id {sample_id!r}")
    images = record.get("images", [])
    if not isinstance(images, list):
        raise EvalSetError(f"{where}: 'images' must be a list")
    image_paths = tuple(str(base_dir / str(p)) for p in images)
    prompt = str(record.get("prompt", ""))
    kind = record.get("kind", KIND_EXTRACTION)

    try:
        if kind == KIND_OCR:
            answers = record.get("answers")
            if answers is None:
                answers = [_require(record, "answer", where)]
            if isinstance(answers, str) or not isinstance(answers, list):
                raise EvalSetError(f"{where}: 'answers' must be a list of strings")
            return OcrSample(
                sample_id=sample_id,
                category=OcrCategory(_require(record, "category", where)),
                prompt=prompt,
                answers=tuple(str(a) for a in answers),
                images=image_paths,
            )
        if kind == KIND_EXTRACTION:
            ground_truth = _require(record, "ground_truth", where)
            tree = to_tree(ground_truth)
            if tree.kind is not NodeKind.SCALAR and not tree.children:
                raise EvalSetError(f"{where}: ground truth is empty")
            return ExtractionSample(
                sample_id=sample_id,
                doc_type=DocType(_require(record, "doc_type", where)),
                prompt=prompt,
                ground_truth=ground_truth,
                images=image_paths,
            )
    except ValueError as e:
        if isinstance(e, EvalSetError):
            raise
        raise EvalSetError(f"{where}: {e}") from None
    raise EvalSetError(f"{where}: unknown sample kind {kind!r}")


def load_eval_set(path: Union[str, Path]) -> List[Sample]:
    """
    Read an eval set.

    Raises:
        FileNotFoundError: If the file does not exist
        EvalSetError: On malformed lines, duplicate ids or an empty set
    """
    path = Path(path)
    samples: List[Sample] = []
    seen = set()
    with path.open(encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            where = f"{path.name} line {line_no}"
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise EvalSetError(f"{where}: invalid JSON ({e.msg})") from None
            sample = _parse_sample(record, path.parent, where)
            if sample.sample_id in seen:
                raise EvalSetError(f"{where}: duplicate sample id {sample.sample_id!r}")
            seen.add(sample.sample_id)
            samples.append(sample)
    if not samples:
        raise EvalSetError(f"eval set {path} is empty")
    return samples


def result_to_dict(result: Result) -> Dict[str, Any]:
    if isinstance(result, ExtractionResult):
        return {
            "id": result.sample_id,
            "kind": KIND_EXTRACTION,
            "doc_type": result.doc_type.value,
            "raw_prediction": result.raw_prediction,
            "error": result.error,
            "scores": result.scores.to_dict(),
        }
    return {
        "id": result.sample_id,
        "kind": KIND_OCR,
        "category": result.category.value,
        "raw_prediction": result.raw_prediction,
        "error": result.error,
        "correct": result.correct,
    }


def result_from_dict(record: Dict[str, Any]) -> Result:
    kind = record.get("kind", KIND_EXTRACTION)
    if kind == KIND_OCR:
        return OcrResult(
            sample_id=str(record["id"]),
            category=OcrCategory(record["category"]),
            correct=int(record["correct"]),
            raw_prediction=record.get("raw_prediction"),
            error=record.get("error"),
        )
    scores = record["scores"]
    return ExtractionResult(
        sample_id=str(record["id"]),
        doc_type=DocType(record["doc_type"]),
        scores=ScoreBreakdown(
            perfect_match=int(scores["perfect_match"]),
            effective_ted=float(scores["effective_ted"]),
            kv_f1=float(scores["kv_f1"]),
            parsed=bool(scores["parsed"]),
            errored=bool(scores.get("errored", False)),
        ),
        raw_prediction=record.get("raw_prediction"),
        error=record.get("error"),
    )


def load_results(path: Union[str, Path]) -> List[Result]:
    """Read a per-sample results file written by ``run_eval``."""
    path = Path(path)
    results: List[Result] = []
    with path.open(encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                results.append(result_from_dict(json.loads(line)))
            except (ValueError, KeyError, TypeError) as e:
                raise EvalSetError(f"{path.name} line {line_no}: malformed result record ({e})") from None
    return results


def _write_results(path: Path, results: Iterable[Result]) -> None:
    ordered = sorted(results, key=lambda r: r.sample_id)

    def write(f):
        for result in ordered:
            f.write(json.dumps(result_to_dict(result), sort_keys=True, ensure_ascii=False))
            f.write("\n")

    atomic_write(path, write)


def evaluate_sample(sample: Sample, client: InferenceClient) -> Result:
    """Query ``client`` for one sample and score the answer; transport failures score 0."""
    error: Optional[str] = None
    raw: Optional[str] = None
    try:
        raw = client.send(sample.prompt, sample.images, sample_id=sample.sample_id)
    except InferenceError as e:
        error = str(e)
        logger.warning("Sample %s errored: %s", sample.sample_id, e)

    if isinstance(sample, OcrSample):
        correct = 0 if raw is None else ocr_text_score(raw, sample.answers, sample.category)
        return OcrResult(
            sample_id=sample.sample_id,
            category=sample.category,
            correct=correct,
            raw_prediction=raw,
            error=error,
        )

    if error is not None:
        scores = ScoreBreakdown(perfect_match=0, effective_ted=0.0, kv_f1=0.0, parsed=False, errored=True)
    else:
        scores = score_prediction(raw, to_tree(sample.ground_truth))
    return ExtractionResult(
        sample_id=sample.sample_id,
        doc_type=sample.doc_type,
        scores=scores,
        raw_prediction=raw,
        error=error,
    )


def summarize(results: Sequence[Result], skipped: int = 0) -> EvalOutcome:
    """Aggregate a mixed list of extraction and OCR results."""
    extraction = [r for r in results if isinstance(r, ExtractionResult)]
    ocr = [r for r in results if isinstance(r, OcrResult)]
    if not extraction and not ocr:
        raise ValueError("no results to summarize")
    errored = sorted(r.sample_id for r in results if r.error is not None)
    return EvalOutcome(
        extraction=aggregate(extraction) if extraction else None,
        ocr=aggregate_ocr(ocr) if ocr else None,
        scored=len(results) - skipped,
        skipped=skipped,
        errored_ids=tuple(errored),
    )


def run_eval(
    samples: Sequence[Sample],
    client: InferenceClient,
    results_path: Optional[Union[str, Path]] = None,
    concurrency: int = 1,
) -> EvalOutcome:
    """
    Evaluate every sample and aggregate the scores.

    Up to ``concurrency`` requests are in flight; only the calling thread
    writes the results file. Samples already present in an existing results
    file are not queried again. On completion the file is rewritten sorted by
    sample id, so its bytes do not depend on completion order. Records in that
    file for ids outside ``samples`` are kept but left out of the summary.

    Raises:
        ValueError: If ``samples`` is empty or ``concurrency`` < 1
        EvalSetError: On a fatal setup problem such as a malformed fixture
    """
    if not samples:
        raise ValueError("eval set is empty")
    if concurrency < 1:
        raise ValueError(f"concurrency must be >= 1, got {concurrency}")

    wanted = {s.sample_id for s in samples}
    done: Dict[str, Result] = {}
    # records for ids outside this eval set survive the final rewrite untouched
    foreign: Dict[str, Result] = {}
    out_path = Path(results_path) if results_path is not None else None
    if out_path is not None and out_path.exists():
        for result in load_results(out_path):
            if result.sample_id in wanted:
                done[result.sample_id] = result
            else:
                foreign[result.sample_id] = result
        if done:
            logger.info("Resuming: %d of %d samples already scored", len(done), len(samples))
    skipped = len(done)
    pending = [s for s in samples if s.sample_id not in done]

    sink = None
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        sink = out_path.open("a", encoding="utf-8")
    pool = ThreadPoolExecutor(max_workers=concurrency)
    try:
        futures = [pool.submit(evaluate_sample, s, client) for s in pending]
        for i, future in enumerate(as_completed(futures), start=1):
            result = future.result()
            done[result.sample_id] = result
            if sink is not None:
                sink.write(json.dumps(result_to_dict(result), sort_keys=True, ensure_ascii=False) + "\n")
                sink.flush()
            if i % 50 == 0 or i == len(futures):
                logger.info("Scored %d/%d samples", i, len(futures))
    except BaseException:
        pool.shutdown(wait=True, cancel_futures=True)
        raise
    finally:
        pool.shutdown(wait=True)
        if sink is not None:
            sink.close()

    # aggregate what was persisted, so fresh and resumed runs agree
    results = [result_from_dict(result_to_dict(done[s.sample_id])) for s in samples]
    if out_path is not None:
        _write_results(out_path, results + list(foreign.values()))
    return summarize(results, skipped=skipped)
