"""Tests for JSON trees, extraction and OCR metrics, inference clients and the eval runner."""

import functools
import json
import random
import shutil
from pathlib import Path
from typing import Any, Optional, Sequence, Tuple
from unittest.mock import MagicMock, patch

import numpy as np
import pytest
import requests

from docvision.evaluation import (
    DocType,
    EvalSetError,
    ExtractionResult,
    ExtractionSample,
    HTTPInferenceClient,
    InferenceClient,
    InferenceError,
    JsonNode,
    NodeKind,
    OcrCategory,
    OcrResult,
    ReplayClient,
    ScoreBreakdown,
    aggregate,
    aggregate_ocr,
    canonicalize,
    effective_ted_score,
    flatten,
    kv_f1,
    load_eval_set,
    load_results,
    normalize_ocr_text,
    ocr_text_score,
    parse_prediction,
    perfect_match,
    run_eval,
    score_prediction,
    score_sample,
    to_tree,
    tree_edit_distance,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures" / "eval"


# ---------------------------------------------------------------------------
# Reference tree edit distance over ordered forests, memoized on tuples.
# A tree is (label, children); a forest is a tuple of trees.
# ---------------------------------------------------------------------------


def _as_tuple(node: JsonNode) -> Tuple[str, tuple]:
    return (node.label, tuple(_as_tuple(c) for c in node.children))


def _forest_size(forest: tuple) -> int:
    return sum(1 + _forest_size(children) for _, children in forest)


@functools.lru_cache(maxsize=None)
def _forest_distance(f: tuple, g: tuple) -> int:
    if not f and not g:
        return 0
    if not f:
        return _forest_size(g)
    if not g:
        return _forest_size(f)
    (label_v, kids_v), (label_w, kids_w) = f[-1], g[-1]
    return min(
        _forest_distance(f[:-1] + kids_v, g) + 1,
        _forest_distance(f, g[:-1] + kids_w) + 1,
        _forest_distance(f[:-1], g[:-1]) + _forest_distance(kids_v, kids_w) + (label_v != label_w),
    )


def _oracle_ted(a: JsonNode, b: JsonNode) -> int:
    return _forest_distance((_as_tuple(a),), (_as_tuple(b),))


def _random_json(rng: random.Random, depth: int = 0) -> Any:
    roll = rng.random()
    if depth >= 2 or roll < 0.45:
        return rng.choice([0, 1, "x"])
    if roll < 0.75:
        keys = rng.sample("abc", rng.randint(0, 2))
        return {k: _random_json(rng, depth + 1) for k in keys}
    return [_random_json(rng, depth + 1) for _ in range(rng.randint(0, 2))]


def _random_tree(rng: random.Random, max_nodes: int = 8) -> JsonNode:
    while True:
        tree = to_tree(_random_json(rng))
        if tree.size <= max_nodes:
            return tree


# ---------------------------------------------------------------------------
# Trees
# ---------------------------------------------------------------------------


class TestTrees:
    def test_canonicalize_sorts_keys_and_renders_numbers(self) -> None:
        value = {"b": 5.0, "a": [True, None, " hi "], "c": 2.5}

        assert canonicalize(value) == {"a": ["true", "null", "hi"], "b": "5", "c": "2.5"}

    def test_canonicalize_is_idempotent(self) -> None:
        value = {"z": {"y": [1, 2.0, {"k": False}]}, "a": "v"}

        once = canonicalize(value)

        assert canonicalize(once) == once

    def test_labels(self) -> None:
        tree = to_tree({"items": [{"price": 3}]})

        assert tree.label == "$:object"
        items = tree.children[0]
        assert items.label == "items:array"
        assert items.children[0].label == "[0]:object"
        assert items.children[0].children[0].label == "price=3"
        assert tree.size == 4

    def test_flatten_leaf_paths(self) -> None:
        tree = to_tree({"a": 1, "b": {"c": "x"}, "d": [], "e": {}})

        assert flatten(tree) == [
            (("a",), "1"),
            (("b", "c"), "x"),
            (("d",), "[]"),
            (("e",), "{}"),
        ]

    def test_parse_fenced_block_wins_over_prose(self) -> None:
        raw = 'Sure {"ignored": 1} and\n```json\n{"total": "5.00"}\n```'

        result = parse_prediction(raw)

        assert result.ok
        assert result.value == {"total": "5.00"}

    def test_parse_json_embedded_in_prose(self) -> None:
        result = parse_prediction('The answer is {"a": [1, 2]} as requested.')

        assert result.value == {"a": ["1", "2"]}

    def test_parse_skips_unbalanced_brace(self) -> None:
        result = parse_prediction('costs {about 5} dollars: {"total": 5}')

        assert result.value == {"total": "5"}

    @pytest.mark.parametrize(
        "raw,error",
        [(None, "empty prediction"), ("   ", "empty prediction"), ("no json here", "no JSON object or array found")],
    )
    def test_parse_failures_are_values(self, raw: Optional[str], error: str) -> None:
        result = parse_prediction(raw)

        assert not result.ok
        assert result.error == error

    def test_bare_scalar_is_not_a_prediction(self) -> None:
        assert not parse_prediction("42").ok


# ---------------------------------------------------------------------------
# Tree edit distance
# ---------------------------------------------------------------------------


class TestTreeEditDistance:
    def test_single_relabel(self) -> None:
        assert tree_edit_distance(to_tree({"a": 1, "b": 2}), to_tree({"a": 1, "b": 3})) == 1

    def test_empty_tree_costs_its_size(self) -> None:
        tree = to_tree({"a": {"b": 1}})

        assert tree_edit_distance(None, tree) == 3
        assert tree_edit_distance(tree, None) == 3
        assert tree_edit_distance(None, None) == 0

    def test_matches_reference_recursion(self) -> None:
        rng = random.Random(31)
        for _ in range(1000):
            a, b = _random_tree(rng), _random_tree(rng)
            assert tree_edit_distance(a, b) == _oracle_ted(a, b), (a, b)

    def test_metric_axioms(self) -> None:
        rng = random.Random(32)
        for _ in range(300):
            a, b, c = _random_tree(rng), _random_tree(rng), _random_tree(rng)
            ab = tree_edit_distance(a, b)
            assert tree_edit_distance(a, a) == 0
            assert ab == tree_edit_distance(b, a)
            assert tree_edit_distance(a, c) <= ab + tree_edit_distance(b, c)
            assert ab <= a.size + b.size


# ---------------------------------------------------------------------------
# Extraction metrics
# ---------------------------------------------------------------------------


class TestExtractionMetrics:
    def test_effective_ted_one_edit_in_four_nodes(self) -> None:
        gt = to_tree({"a": 1, "b": 2, "c": 3})
        pred = parse_prediction('{"a": 1, "b": 2, "c": 4}')

        assert effective_ted_score(pred, gt) == pytest.approx(0.75)

    def test_effective_ted_clamps_at_zero(self) -> None:
        gt = to_tree({"a": 1})
        pred = parse_prediction('[[[[[]]]]]')

        assert effective_ted_score(pred, gt) == 0.0

    def test_f1_half_recall(self) -> None:
        gt = to_tree({"a": 1, "b": 2, "c": 3, "d": 4})
        pred = parse_prediction('{"a": 1, "b": 2}')

        assert kv_f1(pred, gt) == pytest.approx(2 / 3)

    def test_f1_no_overlap(self) -> None:
        assert kv_f1(parse_prediction('{"a": 2}'), to_tree({"a": 1})) == 0.0

    def test_perfect_match_ignores_key_order_and_number_form(self) -> None:
        gt = to_tree({"total": 5, "merchant": "Deli"})
        pred = parse_prediction('{"merchant": "Deli", "total": 5.0}')

        assert perfect_match(pred, gt) == 1
        assert effective_ted_score(pred, gt) == 1.0
        assert kv_f1(pred, gt) == 1.0

    def test_array_order_matters(self) -> None:
        gt = to_tree({"items": ["a", "b"]})

        assert perfect_match(parse_prediction('{"items": ["b", "a"]}'), gt) == 0

    def test_unparsed_prediction_scores_zero(self) -> None:
        scores = score_prediction("sorry, no idea", to_tree({"a": 1}))

        assert scores == ScoreBreakdown(perfect_match=0, effective_ted=0.0, kv_f1=0.0, parsed=False)
        assert scores.accuracy == 0.0

    @pytest.mark.parametrize("gt", [{}, []])
    def test_empty_ground_truth_is_rejected(self, gt) -> None:
        with pytest.raises(ValueError, match="ground truth tree is empty"):
            score_prediction('{"a": 1}', to_tree(gt))

    def test_score_sample(self) -> None:
        sample = ExtractionSample(
            sample_id="s",
            doc_type=DocType.RECEIPT,
            prompt="",
            ground_truth={"total": "1.00"},
            raw_prediction='{"total": "1.00"}',
        )

        assert score_sample(sample).perfect_match == 1

    def test_random_predictions_respect_invariants(self) -> None:
        rng = random.Random(33)
        for _ in range(500):
            gt = to_tree(_random_json(rng))
            if gt.kind is not NodeKind.SCALAR and not gt.children:
                continue
            raw = json.dumps(_random_json(rng))
            scores = score_prediction(raw, gt)
            assert 0.0 <= scores.effective_ted <= 1.0
            assert 0.0 <= scores.kv_f1 <= 1.0
            if scores.perfect_match:
                assert scores.effective_ted == scores.kv_f1 == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"perfect_match": 2, "effective_ted": 1.0, "kv_f1": 1.0, "parsed": True},
            {"perfect_match": 0, "effective_ted": 1.5, "kv_f1": 0.0, "parsed": True},
            {"perfect_match": 1, "effective_ted": 0.9, "kv_f1": 1.0, "parsed": True},
            {"perfect_match": 0, "effective_ted": 0.2, "kv_f1": 0.0, "parsed": False},
        ],
    )
    def test_score_breakdown_invariants(self, kwargs) -> None:
        with pytest.raises(ValueError):
            ScoreBreakdown(**kwargs)


def _result(sample_id: str, doc_type: DocType, pm: int, ted: float, f1: float) -> ExtractionResult:
    return ExtractionResult(
        sample_id=sample_id,
        doc_type=doc_type,
        scores=ScoreBreakdown(perfect_match=pm, effective_ted=ted, kv_f1=f1, parsed=True),
    )


class TestAggregate:
    def _results(self):
        return [
            _result("r1", DocType.RECEIPT, 1, 1.0, 1.0),
            _result("r2", DocType.RECEIPT, 0, 0.96, 0.96),
            _result("d1", DocType.DRIVERS_LICENSE, 0, 0.846, 0.846),
            _result("c1", DocType.CHECK, 0, 0.6225, 0.6225),
        ]

    def test_overall_is_unweighted_mean_of_type_accuracies(self) -> None:
        report = aggregate(self._results())

        assert report.per_type[DocType.RECEIPT].accuracy == pytest.approx(82.0)
        assert report.per_type[DocType.DRIVERS_LICENSE].accuracy == pytest.approx(56.4)
        assert report.per_type[DocType.CHECK].accuracy == pytest.approx(41.5)
        assert round(report.overall, 2) == 59.97
        assert report.num_samples == 4

    def test_independent_of_result_order(self) -> None:
        results = self._results()
        expected = aggregate(results).to_dict()
        rng = random.Random(34)
        for _ in range(20):
            rng.shuffle(results)
            assert aggregate(results).to_dict() == expected

    def test_doc_types_are_sorted(self) -> None:
        assert list(aggregate(self._results()).to_dict()["doc_types"]) == ["check", "drivers_license", "receipt"]

    def test_empty(self) -> None:
        with pytest.raises(ValueError):
            aggregate([])


# ---------------------------------------------------------------------------
# OCR
# ---------------------------------------------------------------------------


class TestOcr:
    @pytest.mark.parametrize(
        "pred,gt,expected",
        [
            ("The sign says: STOP.", "stop", 1),
            ("stop", "STOP!", 1),
            ("go", "stop", 0),
            ("anything", "", 0),
            ("Invoice no. 42", ["forty two", "42"], 1),
            ("", ["a"], 0),
            ("The total is $5.00", "$5.00", 1),
            ("Total: 1,234", "1234", 1),
            ("Made in U.S.A.", "USA", 1),
            ("e-mail", "email", 1),
        ],
    )
    def test_containment(self, pred: str, gt, expected: int) -> None:
        assert ocr_text_score(pred, gt) == expected

    def test_hmer_keeps_case_and_symbols(self) -> None:
        assert ocr_text_score("x^{2} + 1", "x^{2}+1", OcrCategory.HMER) == 1
        assert ocr_text_score("X^{2}+1", "x^{2}+1", OcrCategory.HMER) == 0
        assert ocr_text_score("x2+1", "x^{2}+1", OcrCategory.HMER) == 0

    def test_normalization(self) -> None:
        assert normalize_ocr_text("  Hello,\tWorld!  ") == "hello world"
        assert normalize_ocr_text("a \n b", OcrCategory.HMER) == "ab"
        assert normalize_ocr_text("Total: 1,234") == "total 1234"
        assert normalize_ocr_text("U.S.A.") == "usa"
        assert normalize_ocr_text("a - b") == "a b"

    def test_aggregate_counts_per_category(self) -> None:
        results = [
            OcrResult("a", OcrCategory.KIE, 1),
            OcrResult("b", OcrCategory.KIE, 0, error="timeout"),
            OcrResult("c", OcrCategory.DOC_VQA, 1),
        ]

        report = aggregate_ocr(results)

        assert report.score == 2
        assert report.total == 3
        assert report.errored == 1
        assert report.to_dict()["categories"] == {
            "doc_vqa": {"correct": 1, "total": 1},
            "kie": {"correct": 1, "total": 2},
        }


# ---------------------------------------------------------------------------
# Clients
# ---------------------------------------------------------------------------


class TestReplayClient:
    def test_reads_recorded_response(self) -> None:
        client = ReplayClient(FIXTURES / "responses")

        assert client.send("ignored", [], sample_id="o-002") == "x^{2}+1\n"

    def test_missing_response_is_an_inference_error(self) -> None:
        with pytest.raises(InferenceError):
            ReplayClient(FIXTURES / "responses").send("p", [], sample_id="nope")

    def test_missing_directory(self, tmp_path: Path) -> None:
        with pytest.raises(EvalSetError):
            ReplayClient(tmp_path / "absent")

    def test_non_utf8_fixture_is_fatal(self, tmp_path: Path) -> None:
        (tmp_path / "bad.txt").write_bytes(b"\xff\xfe\xfa")

        with pytest.raises(EvalSetError):
            ReplayClient(tmp_path).send("p", [], sample_id="bad")


def _response(payload=None, json_error: Optional[Exception] = None) -> MagicMock:
    response = MagicMock()
    response.raise_for_status.return_value = None
    if json_error is not None:
        response.json.side_effect = json_error
    else:
        response.json.return_value = payload
    return response


class TestHTTPInferenceClient:
    @pytest.fixture(autouse=True)
    def _clean_env(self, monkeypatch: pytest.MonkeyPatch) -> None:
        for name in ("DOCVISION_ENDPOINT", "DOCVISION_API_TOKEN", "DOCVISION_MODEL"):
            monkeypatch.delenv(name, raising=False)

    def test_requires_endpoint(self) -> None:
        with pytest.raises(EvalSetError):
            HTTPInferenceClient()

    def test_reads_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("DOCVISION_ENDPOINT", "http://model.local/v1/chat/")
        monkeypatch.setenv("DOCVISION_MODEL", "desk-2b")

        client = HTTPInferenceClient()

        assert client.endpoint == "http://model.local/v1/chat"
        assert client.model == "desk-2b"

    def test_posts_images_and_prompt(self, tmp_path: Path) -> None:
        image = tmp_path / "page.png"
        image.write_bytes(b"PNGDATA")
        client = HTTPInferenceClient("http://model.local/chat", api_token="secret", request_timeout_s=5)

        with patch.object(requests.Session, "post", return_value=_response({"content": "{}"})) as mock_post:
            answer = client.send("Read it", [str(image)], sample_id="s1")

        assert answer == "{}"
        args, kwargs = mock_post.call_args
        assert args == ("http://model.local/chat",)
        assert kwargs["timeout"] == 5.0
        assert kwargs["headers"]["Authorization"] == "Bearer secret"
        body = kwargs["json"]
        assert body["model"] == "docvision"
        content = body["messages"][0]["content"]
        assert content[0] == {"type": "image", "data": "UE5HREFUQQ=="}
        assert content[-1] == {"type": "text", "data": "Read it"}

    @pytest.mark.parametrize(
        "post_kwargs",
        [
            {"side_effect": requests.ConnectionError("refused")},
            {"return_value": _response(json_error=ValueError("not json"))},
            {"return_value": _response({"text": "wrong field"})},
            {"return_value": _response({"content": 7})},
        ],
    )
    def test_failures_become_inference_errors(self, post_kwargs) -> None:
        client = HTTPInferenceClient("http://model.local/chat")

        with patch.object(requests.Session, "post", **post_kwargs):
            with pytest.raises(InferenceError):
                client.send("p", [], sample_id="s")

    def test_unreadable_image(self, tmp_path: Path) -> None:
        client = HTTPInferenceClient("http://model.local/chat")

        with pytest.raises(InferenceError, match="cannot read image"):
            client.send("p", [str(tmp_path / "missing.png")])


# ---------------------------------------------------------------------------
# Eval sets and the runner
# ---------------------------------------------------------------------------


class _FailingClient(InferenceClient):
    def send(self, prompt: str, images: Sequence[str], *, sample_id: Optional[str] = None) -> str:
        raise AssertionError(f"sample {sample_id} should not have been queried")


def _write_set(path: Path, *records: dict) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return path


class TestLoadEvalSet:
    def test_fixture_set(self) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")

        assert len(samples) == 8
        hmer = next(s for s in samples if s.sample_id == "o-002")
        assert hmer.answers == ("x^{2} + 1",)

    def test_images_resolve_against_set_dir(self, tmp_path: Path) -> None:
        path = _write_set(
            tmp_path / "set.jsonl",
            {"id": "a", "doc_type": "other", "images": ["img/a.png"], "ground_truth": {"k": "v"}},
        )

        (sample,) = load_eval_set(path)

        assert sample.images == (str(tmp_path / "img" / "a.png"),)

    @pytest.mark.parametrize(
        "records,match",
        [
            ([{"id": "a", "doc_type": "receipt", "ground_truth": {}}], "ground truth is empty"),
            ([{"id": "a/b", "doc_type": "receipt", "ground_truth": {"k": 1}}], "invalid sample id"),
            ([{"id": "a", "doc_type": "menu", "ground_truth": {"k": 1}}], "menu"),
            ([{"id": "a", "kind": "ocr", "category": "kie", "answers": []}], "no reference answers"),
            ([{"id": "a", "kind": "audio"}], "unknown sample kind"),
            (
                [
                    {"id": "a", "doc_type": "receipt", "ground_truth": {"k": 1}},
                    {"id": "a", "doc_type": "receipt", "ground_truth": {"k": 2}},
                ],
                "duplicate",
            ),
            ([], "is empty"),
        ],
    )
    def test_malformed_sets(self, tmp_path: Path, records, match: str) -> None:
        path = _write_set(tmp_path / "set.jsonl", *records)

        with pytest.raises(EvalSetError, match=match):
            load_eval_set(path)

    def test_invalid_json_line(self, tmp_path: Path) -> None:
        path = tmp_path / "set.jsonl"
        path.write_text("{not json\n", encoding="utf-8")

        with pytest.raises(EvalSetError, match="line 1"):
            load_eval_set(path)


class TestRunEval:
    def test_replay_run_scores_fixture_set(self, tmp_path: Path) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")
        results_path = tmp_path / "results.jsonl"

        outcome = run_eval(samples, ReplayClient(FIXTURES / "responses"), results_path)

        report = outcome.extraction
        receipt = report.per_type[DocType.RECEIPT]
        assert receipt.count == 3
        assert receipt.perfect_match == pytest.approx(1 / 3)
        assert receipt.effective_ted == pytest.approx(5 / 9, abs=1e-6)
        assert receipt.kv_f1 == pytest.approx(0.5)
        assert receipt.parse_rate == pytest.approx(2 / 3)
        assert report.per_type[DocType.DRIVERS_LICENSE].accuracy == pytest.approx(100.0)
        check = report.per_type[DocType.CHECK]
        assert check.accuracy == 0.0
        assert check.errored == 1
        assert report.overall == pytest.approx((100 * 25 / 54 + 100.0 + 0.0) / 3, abs=1e-4)
        assert outcome.ocr.score == 2
        assert outcome.ocr.total == 3
        assert outcome.errored_ids == ("c-001",)
        assert (outcome.scored, outcome.skipped) == (8, 0)

    def test_results_file_is_sorted_and_reloadable(self, tmp_path: Path) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")
        results_path = tmp_path / "results.jsonl"

        run_eval(samples, ReplayClient(FIXTURES / "responses"), results_path, concurrency=4)

        ids = [json.loads(line)["id"] for line in results_path.read_text(encoding="utf-8").splitlines()]
        assert ids == sorted(s.sample_id for s in samples)
        assert len(load_results(results_path)) == 8

    def test_concurrency_does_not_change_output(self, tmp_path: Path) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")
        serial, parallel = tmp_path / "serial.jsonl", tmp_path / "parallel.jsonl"

        a = run_eval(samples, ReplayClient(FIXTURES / "responses"), serial, concurrency=1)
        b = run_eval(samples, ReplayClient(FIXTURES / "responses"), parallel, concurrency=8)

        assert a.to_dict() == b.to_dict()
        assert serial.read_bytes() == parallel.read_bytes()

    def test_resume_skips_scored_samples(self, tmp_path: Path) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")
        results_path = tmp_path / "results.jsonl"
        first = run_eval(samples, ReplayClient(FIXTURES / "responses"), results_path)
        before = results_path.read_bytes()

        second = run_eval(samples, _FailingClient(), results_path)

        assert second.skipped == 8
        assert second.scored == 0
        assert second.to_dict() == first.to_dict()
        assert results_path.read_bytes() == before

    def test_resume_after_partial_run(self, tmp_path: Path) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")
        full_path = tmp_path / "full.jsonl"
        full = run_eval(samples, ReplayClient(FIXTURES / "responses"), full_path)
        partial_path = tmp_path / "partial.jsonl"
        lines = full_path.read_text(encoding="utf-8").splitlines(keepends=True)
        partial_path.write_text("".join(lines[:3]), encoding="utf-8")

        resumed = run_eval(samples, ReplayClient(FIXTURES / "responses"), partial_path, concurrency=2)

        assert resumed.skipped == 3
        assert resumed.to_dict() == full.to_dict()
        assert partial_path.read_bytes() == full_path.read_bytes()

    def test_subset_rerun_keeps_other_records(self, tmp_path: Path) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")
        results_path = tmp_path / "results.jsonl"
        run_eval(samples, ReplayClient(FIXTURES / "responses"), results_path)
        before = results_path.read_bytes()

        subset = run_eval(samples[:1], _FailingClient(), results_path)

        assert subset.skipped == 1
        assert subset.scored == 0
        assert results_path.read_bytes() == before
        assert len(load_results(results_path)) == 8

    def test_disjoint_runs_share_one_file(self, tmp_path: Path) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")
        client = ReplayClient(FIXTURES / "responses")
        shared, whole = tmp_path / "shared.jsonl", tmp_path / "whole.jsonl"

        run_eval(samples[4:], client, shared)
        second = run_eval(samples[:4], client, shared)
        run_eval(samples, client, whole)

        assert second.skipped == 0
        assert second.scored == 4
        assert shared.read_bytes() == whole.read_bytes()

    def test_fixture_dir_can_be_copied(self, tmp_path: Path) -> None:
        shutil.copytree(FIXTURES, tmp_path / "eval")
        (tmp_path / "eval" / "responses" / "c-001.txt").write_text('{"amount": "100.00"}', encoding="utf-8")
        samples = load_eval_set(tmp_path / "eval" / "eval.jsonl")

        outcome = run_eval(samples, ReplayClient(tmp_path / "eval" / "responses"))

        check = outcome.extraction.per_type[DocType.CHECK]
        assert check.errored == 0
        assert check.kv_f1 == pytest.approx(2 / 3)
        assert outcome.errored_ids == ()

    @pytest.mark.parametrize("concurrency", [0, -1])
    def test_rejects_bad_concurrency(self, concurrency: int) -> None:
        samples = load_eval_set(FIXTURES / "eval.jsonl")

        with pytest.raises(ValueError):
            run_eval(samples, ReplayClient(FIXTURES / "responses"), concurrency=concurrency)

    def test_scores_are_finite_for_random_predictions(self) -> None:
        rng = np.random.default_rng(35)
        gt = {"a": "1", "b": ["x", "y"]}
        for _ in range(200):
            raw = json.dumps({k: int(v) for k, v in zip("abc", rng.integers(0, 3, size=3))})
            scores = score_prediction(raw, to_tree(gt))
            assert np.isfinite(scores.accuracy)
