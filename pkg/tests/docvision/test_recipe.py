"""Tests for mixture tables, manifest composition and stage schedules."""

import io
import json
from collections import Counter
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from docvision.recipe import (
    EXPECTED_FREEZE,
    InputType,
    MixtureParseError,
    MixtureValidationError,
    ScheduleParseError,
    StageKind,
    Task,
    bundled_mixtures,
    bundled_schedules,
    compose_mixture,
    load_mixture,
    load_schedule,
    mixture_stats,
    parse_mixture,
    parse_schedule,
    scale_counts,
    validate_schedule,
    write_manifest,
)

BUNDLED_TOTALS = {
    "2b_pretrain": 5_251_201,
    "2b_finetune": 11_947_390,
    "0.8b_pretrain_step1": 353_755,
    "0.8b_pretrain_step2": 11_445_394,
    "0.8b_finetune": 7_886_660,
}

SMALL_TABLE = """task,input_type,count
ocr_doc,single_image,6
captioning,single_image,3
general_qa,text_only,1
total,,10
"""


class TestMixtureTables:
    def test_bundled_names_match_stage_kinds(self) -> None:
        assert set(bundled_mixtures()) == {k.value for k in StageKind}

    @pytest.mark.parametrize("name,total", sorted(BUNDLED_TOTALS.items()))
    def test_bundled_totals(self, name: str, total: int) -> None:
        assert load_mixture(name).total == total

    def test_load_from_path(self, tmp_path: Path) -> None:
        path = tmp_path / "tiny.csv"
        path.write_text(SMALL_TABLE, encoding="utf-8")

        table = load_mixture(path)

        assert table.name == "tiny"
        assert table.total == 10
        assert table.rows[0].key == (Task.OCR_DOC, InputType.SINGLE_IMAGE)

    def test_declared_total_mismatch(self) -> None:
        text = SMALL_TABLE.replace("total,,10", "total,,11")

        with pytest.raises(MixtureValidationError) as exc_info:
            parse_mixture("tiny", text)

        assert exc_info.value.declared == 11
        assert exc_info.value.computed == 10

    @pytest.mark.parametrize(
        "text,match",
        [
            ("", "empty"),
            ("task,count\n", "expected header"),
            ("task,input_type,count\nocr_doc,single_image\n", "line 2: expected 3 fields"),
            ("task,input_type,count\nocr_doc,single_image,many\n", "not an integer"),
            ("task,input_type,count\nocr_doc,single_image,-1\n", ">= 0"),
            ("task,input_type,count\ndancing,single_image,1\n", "line 2"),
            ("task,input_type,count\nocr_doc,single_image,1\nocr_doc,single_image,2\n", "duplicate"),
        ],
    )
    def test_parse_errors(self, text: str, match: str) -> None:
        with pytest.raises(MixtureParseError, match=match):
            parse_mixture("bad", text)

    def test_unknown_bundled_name(self) -> None:
        with pytest.raises(FileNotFoundError):
            load_mixture("3b_pretrain")


class TestScaleCounts:
    def test_largest_remainder_example(self) -> None:
        # 14.3, 196.69, 314.13 floor to 524; the extra unit goes to the largest remainder
        assert scale_counts([143_000, 1_966_936, 3_141_265], 1e-4) == [14, 197, 314]

    def test_ties_go_to_earlier_row(self) -> None:
        assert scale_counts([1, 1, 1], Fraction(1, 2)) == [1, 1, 0]

    def test_full_scale_is_identity(self) -> None:
        assert scale_counts([5, 0, 7], 1) == [5, 0, 7]

    @pytest.mark.parametrize("scale", [0, -0.5, 1.5])
    def test_rejects_out_of_range(self, scale) -> None:
        with pytest.raises(ValueError):
            scale_counts([1, 2], scale)

    def test_total_is_conserved_over_random_tables(self) -> None:
        rng = np.random.default_rng(8)
        for _ in range(1000):
            counts = rng.integers(0, 100_000, size=int(rng.integers(1, 12))).tolist()
            scale = Fraction(int(rng.integers(1, 1000)), 1000)

            scaled = scale_counts(counts, scale)

            expected_total = int((sum(counts) * scale + Fraction(1, 2)) // 1)
            assert sum(scaled) == expected_total
            for original, new in zip(counts, scaled):
                assert abs(new - original * scale) < 1


class TestComposeMixture:
    def test_pretrain_at_small_scale(self) -> None:
        manifest = compose_mixture(load_mixture("2b_pretrain"), scale=1e-4, seed=0)

        assert len(manifest) == 525
        assert manifest.counts == {
            (Task.GENERAL_QA, InputType.TEXT_ONLY): 14,
            (Task.CAPTIONING, InputType.SINGLE_IMAGE): 197,
            (Task.OCR_DOC, InputType.SINGLE_IMAGE): 314,
        }

    @pytest.mark.parametrize("name", sorted(BUNDLED_TOTALS))
    def test_full_scale_reproduces_every_count(self, name: str) -> None:
        table = load_mixture(name)

        manifest = compose_mixture(table, scale=1.0, seed=7)

        assert len(manifest) == BUNDLED_TOTALS[name]
        assert [row.count for row in manifest.rows] == [row.count for row in table.rows]

    def test_entries_realize_counts_and_ids_are_unique(self) -> None:
        manifest = compose_mixture(load_mixture("0.8b_finetune"), scale=1e-3, seed=3)

        entries = list(manifest.entries(chunk_size=100))

        assert len(entries) == len(manifest)
        assert len({e.sample_id for e in entries}) == len(entries)
        realized = Counter((e.task, e.input_type) for e in entries)
        assert dict(realized) == {k: v for k, v in manifest.counts.items() if v}

    def test_order_is_a_permutation(self) -> None:
        manifest = compose_mixture(parse_mixture("tiny", SMALL_TABLE), seed=5)

        assert sorted(manifest.order.tolist()) == list(range(10))

    def test_same_seed_same_manifest(self) -> None:
        table = load_mixture("0.8b_pretrain_step1")

        a = [e.sample_id for e in compose_mixture(table, scale=1e-3, seed=42).entries()]
        b = [e.sample_id for e in compose_mixture(table, scale=1e-3, seed=42).entries()]
        c = [e.sample_id for e in compose_mixture(table, scale=1e-3, seed=43).entries()]

        assert a == b
        assert a != c
        assert sorted(a) == sorted(c)

    def test_write_manifest_jsonl(self) -> None:
        manifest = compose_mixture(parse_mixture("tiny", SMALL_TABLE), seed=1)
        out = io.StringIO()

        written = write_manifest(manifest, out)

        lines = out.getvalue().splitlines()
        assert written == len(lines) == 10
        record = json.loads(lines[0])
        assert set(record) == {"id", "stage", "task", "input_type", "schema_version"}
        assert record["stage"] == "tiny"
        assert record["id"].startswith(f"tiny/{record['task']}/{record['input_type']}/")
        assert record["schema_version"] == 1


class TestMixtureStats:
    def test_pretrain_shares(self) -> None:
        stats = mixture_stats(load_mixture("2b_pretrain"))

        assert stats == {Task.GENERAL_QA: 2.7, Task.CAPTIONING: 37.5, Task.OCR_DOC: 59.8}

    def test_finetune_ocr_share(self) -> None:
        assert mixture_stats(load_mixture("0.8b_finetune"))[Task.OCR_DOC] == 71.8

    def test_single_task_table(self) -> None:
        table = parse_mixture("one", "task,input_type,count\nreasoning,multi_image,3\n")

        assert mixture_stats(table) == {Task.REASONING: 100.0}

    def test_empty_table(self) -> None:
        with pytest.raises(ValueError, match="empty"):
            mixture_stats(parse_mixture("none", "task,input_type,count\n"))


class TestSchedules:
    def test_every_bundled_schedule_is_valid(self) -> None:
        names = bundled_schedules()

        assert set(names) == {k.value for k in StageKind}
        for name in names:
            report = validate_schedule(load_schedule(name))
            assert report.ok, report.violations

    def test_pretrain_values(self) -> None:
        schedule = load_schedule("2b_pretrain")

        assert schedule.epochs == (4,)
        assert schedule.learning_rate == (4e-5,)
        assert (schedule.freeze_vit, schedule.freeze_llm, schedule.freeze_mlp) == (False, True, False)
        assert schedule.hours_of_training == 36

    def test_small_finetune_learning_rate(self) -> None:
        assert load_schedule("0.8b_finetune").learning_rate == (1e-5,)

    def test_finetune_sub_stages(self) -> None:
        schedule = load_schedule("2b_finetune")

        parts = schedule.sub_stages()

        assert [p.stage for p in parts] == ["2b_finetune/1", "2b_finetune/2"]
        assert [p.learning_rate for p in parts] == [(4e-5,), (2e-5,)]
        assert [p.epochs for p in parts] == [(2,), (1,)]
        assert schedule.total_epochs == 3

    def test_single_value_stage_has_one_sub_stage(self) -> None:
        schedule = load_schedule("0.8b_pretrain_step1")

        assert schedule.sub_stages() == [schedule]

    @pytest.mark.parametrize("kind", list(StageKind))
    @pytest.mark.parametrize("flag", ["freeze_vit", "freeze_llm"])
    def test_flipping_one_flag_gives_one_violation(self, kind: StageKind, flag: str) -> None:
        schedule = load_schedule(kind.value)
        flipped = replace(schedule, **{flag: not getattr(schedule, flag)})

        report = validate_schedule(flipped)

        assert len(report.violations) == 1
        assert report.violations[0].startswith(flag)

    def test_frozen_projector_is_always_a_violation(self) -> None:
        for kind in StageKind:
            schedule = replace(load_schedule(kind.value), freeze_mlp=True)

            report = validate_schedule(schedule)

            assert not report.ok
            assert any("never frozen" in v for v in report.violations)

    def test_expected_freeze_matches_bundled(self) -> None:
        for kind, (vit, llm) in EXPECTED_FREEZE.items():
            schedule = load_schedule(kind.value)
            assert (schedule.freeze_vit, schedule.freeze_llm) == (vit, llm)

    def test_explicit_kind_overrides_stage_name(self, tmp_path: Path) -> None:
        text = (
            "freeze_vit: true\nfreeze_llm: true\nfreeze_mlp: false\nimage_size: 448\n"
            "max_num_tiles: 6\nlearning_rate: 1e-4\nscheduler: cosine\nbatch_size: 256\n"
            "weight_decay: 0.01\nepochs: 1\n"
        )
        path = tmp_path / "custom.yaml"
        path.write_text(text, encoding="utf-8")
        schedule = load_schedule(path)

        assert schedule.stage == "custom"
        assert validate_schedule(schedule, kind="0.8b_pretrain_step1").ok
        assert not validate_schedule(schedule, kind="2b_finetune").ok
        with pytest.raises(ValueError, match="unknown stage kind"):
            validate_schedule(schedule)

    def test_key_value_file_matches_bundled_yaml(self, tmp_path: Path) -> None:
        text = (
            "# full fine-tuning, two sub-stages\n"
            "stage=2b_finetune\n"
            "freeze_vit=false\nfreeze_llm=false\nfreeze_mlp=false\n"
            "\n"
            "image_size=448\nmax_num_tiles=6\n"
            "learning_rate=4e-5 -> 2e-5\n"
            "scheduler=cosine\nbatch_size=256\nweight_decay = 0.03\n"
            "epochs=2 -> 1\nhardware=8 x H100\nhours_of_training=158\n"
        )
        path = tmp_path / "finetune.conf"
        path.write_text(text, encoding="utf-8")

        schedule = load_schedule(path)

        assert schedule == load_schedule("2b_finetune")
        assert validate_schedule(schedule).ok

    def test_key_value_file_without_stage_uses_file_name(self, tmp_path: Path) -> None:
        lines = [f"{key}={str(value).lower()}" for key, value in _minimal().items()]
        path = tmp_path / "0.8b_finetune.conf"
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

        schedule = load_schedule(path)

        assert schedule.stage == "0.8b_finetune"
        assert schedule.learning_rate == (1e-5,)
        assert validate_schedule(schedule).ok

    def test_key_value_duplicate_key(self, tmp_path: Path) -> None:
        path = tmp_path / "dup.conf"
        path.write_text("epochs=1\nepochs=2\n", encoding="utf-8")

        with pytest.raises(ScheduleParseError, match="duplicate"):
            load_schedule(path)

    def test_other_violations(self) -> None:
        schedule = replace(
            load_schedule("2b_pretrain"), image_size=336, max_num_tiles=12, scheduler="linear", weight_decay=-1.0
        )

        report = validate_schedule(schedule)

        assert len(report.violations) == 4
        assert report.to_dict()["valid"] is False

    def test_parse_errors(self) -> None:
        with pytest.raises(ScheduleParseError, match="missing keys"):
            parse_schedule({"freeze_vit": True})
        with pytest.raises(ScheduleParseError, match="expected true/false"):
            parse_schedule({**_minimal(), "freeze_vit": "yes"})
        with pytest.raises(ScheduleParseError, match="at most one"):
            parse_schedule({**_minimal(), "learning_rate": "1e-4 -> 1e-5 -> 1e-6"})


def _minimal() -> dict:
    return {
        "freeze_vit": False,
        "freeze_llm": False,
        "freeze_mlp": False,
        "image_size": 448,
        "max_num_tiles": 6,
        "learning_rate": "1e-5",
        "scheduler": "cosine",
        "batch_size": 256,
        "weight_decay": 0.0,
        "epochs": 1,
    }
