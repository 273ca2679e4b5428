"""Ingestion adapters, the canonical JSONL fixpoint, and validation."""

import json

import pytest

from vlmcoord.core import ImageRef, InstanceRecord, TaskFamily
from vlmcoord.datasets import (
    DatasetManifest,
    ingest,
    load_canonical_jsonl,
    record_from_json,
    record_to_json,
    validate,
    write_canonical_jsonl,
)
from vlmcoord.errors import ParseError, ValidationError

from conftest import FIXTURES


def write_rows(path, rows):
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n", encoding="utf-8")


def canonical_row(i=0, **overrides):
    row = {
        "id": f"r{i}",
        "image": {"kind": "opaque_id", "value": f"img{i}"},
        "family": "VQA_MC",
        "question": f"what is in scene {i}?",
        "choices": ["grass", "water"],
        "gold_choice": 0,
        "gold_direct_answers": [],
        "split": "val",
    }
    row.update(overrides)
    return row


class TestCanonical:
    def test_three_rows_order_preserved(self, tmp_path):
        path = tmp_path / "val.jsonl"
        write_rows(path, [canonical_row(i) for i in range(3)])
        manifest = DatasetManifest("custom", TaskFamily.VQA_MC, {"val": str(path)})
        records = ingest(manifest)["val"]
        assert [r.id for r in records] == ["r0", "r1", "r2"]

    def test_ingest_serialize_ingest_fixpoint(self, tmp_path):
        source = FIXTURES / "vqa50" / "val.jsonl"
        first = load_canonical_jsonl(source)
        out = tmp_path / "roundtrip.jsonl"
        write_canonical_jsonl(first, out)
        second = load_canonical_jsonl(out)
        assert first == second
        third = tmp_path / "again.jsonl"
        write_canonical_jsonl(second, third)
        assert out.read_bytes() == third.read_bytes()

    def test_record_json_roundtrip(self):
        record = InstanceRecord(
            id="x",
            image=ImageRef("url", "http://example/img.jpg"),
            family=TaskFamily.VQA_DA,
            question="what?",
            gold_direct_answers=("grass", "grass"),
            split="train",
        )
        assert record_from_json(record_to_json(record)) == record

    def test_bad_gold_index_rejected(self, tmp_path):
        path = tmp_path / "val.jsonl"
        write_rows(path, [canonical_row(gold_choice=5)])
        manifest = DatasetManifest("custom", TaskFamily.VQA_MC, {"val": str(path)})
        with pytest.raises(ValidationError, match="gold_choice 5"):
            ingest(manifest)

    def test_parse_error_carries_location(self, tmp_path):
        path = tmp_path / "val.jsonl"
        path.write_text('{"id": "ok"...broken\n', encoding="utf-8")
        manifest = DatasetManifest("custom", TaskFamily.VQA_MC, {"val": str(path)})
        with pytest.raises(ParseError, match=r"val\.jsonl:1"):
            ingest(manifest)

    def test_split_mismatch_rejected(self, tmp_path):
        path = tmp_path / "val.jsonl"
        write_rows(path, [canonical_row(split="train")])
        manifest = DatasetManifest("custom", TaskFamily.VQA_MC, {"val": str(path)})
        with pytest.raises(ValidationError, match="split"):
            ingest(manifest)


class TestAdapters:
    def test_aokvqa_style_row(self, tmp_path):
        path = tmp_path / "val.json"
        path.write_text(
            json.dumps(
                [
                    {
                        "question_id": "22MexNkBPpdZGX6sxbxVBH",
                        "image_id": 299207,
                        "question": "What is the man riding?",
                        "choices": ["horse", "camel", "motorcycle", "elephant"],
                        "correct_choice_idx": 0,
                        "direct_answers": ["horse"] * 7,
                        "difficult_direct_answer": False,
                        "rationales": ["dropped"],
                    }
                ]
            ),
            encoding="utf-8",
        )
        manifest = DatasetManifest("aokvqa", TaskFamily.VQA_MC, {"val": str(path)})
        record = ingest(manifest)["val"][0]
        assert record.family is TaskFamily.VQA_MC
        assert record.gold_choice == 0
        assert record.choices == ("horse", "camel", "motorcycle", "elephant")
        assert record.image == ImageRef("opaque_id", "299207")

    def test_aokvqa_image_root(self, tmp_path):
        path = tmp_path / "val.jsonl"
        write_rows(
            path,
            [
                {
                    "question_id": "q",
                    "image_id": "000000299207.jpg",
                    "question": "what?",
                    "choices": ["grass", "water"],
                    "correct_choice_idx": 1,
                }
            ],
        )
        manifest = DatasetManifest(
            "aokvqa", TaskFamily.VQA_MC, {"val": str(path)}, image_root="/data/coco"
        )
        record = ingest(manifest)["val"][0]
        assert record.image.kind == "path"
        assert record.image.value.endswith("000000299207.jpg")

    def test_esnlive_labels(self, tmp_path):
        path = tmp_path / "val.jsonl"
        write_rows(
            path,
            [
                {"pairID": "p1", "Flickr30kID": "a.jpg", "hypothesis": "a dog runs",
                 "gold_label": "entailment"},
                {"pairID": "p2", "Flickr30kID": "b.jpg", "hypothesis": "a cat sleeps",
                 "gold_label": "contradiction"},
                {"pairID": "p3", "Flickr30kID": "c.jpg", "hypothesis": "a bird sings",
                 "gold_label": "neutral"},
            ],
        )
        manifest = DatasetManifest("esnlive", TaskFamily.ENTAILMENT, {"val": str(path)})
        records = ingest(manifest)["val"]
        assert [r.gold_choice for r in records] == [0, 1, 2]
        assert all(r.choices == ("yes", "no", "maybe") for r in records)

    def test_vsr_labels(self, tmp_path):
        path = tmp_path / "test.jsonl"
        write_rows(
            path,
            [
                {"image": "i1.jpg", "caption": "the cat is under the table", "label": 1},
                {"image": "i2.jpg", "caption": "the dog is on the sofa", "label": 0},
            ],
        )
        manifest = DatasetManifest("vsr", TaskFamily.SPATIAL, {"test": str(path)})
        records = ingest(manifest)["test"]
        assert [r.gold_choice for r in records] == [0, 1]
        assert all(r.choices == ("yes", "no") for r in records)

    def test_gqa_replicates_single_answer(self, tmp_path):
        path = tmp_path / "val.jsonl"
        write_rows(path, [{"id": "g1", "imageId": "n1", "question": "what color?", "answer": "red"}])
        manifest = DatasetManifest("gqa", TaskFamily.VQA_DA, {"val": str(path)})
        record = ingest(manifest)["val"][0]
        assert record.gold_direct_answers == ("red", "red", "red")

    def test_okvqa_vote_objects(self, tmp_path):
        path = tmp_path / "val.jsonl"
        write_rows(
            path,
            [
                {
                    "question_id": 1,
                    "image_id": 5,
                    "question": "what sport?",
                    "answers": [{"answer": "tennis"}] * 6 + [{"answer": "badminton"}] * 4,
                }
            ],
        )
        manifest = DatasetManifest("okvqa", TaskFamily.VQA_DA, {"val": str(path)})
        record = ingest(manifest)["val"][0]
        assert record.gold_direct_answers.count("tennis") == 6

    def test_family_mismatch_rejected(self, tmp_path):
        path = tmp_path / "val.jsonl"
        write_rows(path, [{"image": "i", "caption": "c", "label": 1}])
        manifest = DatasetManifest("vsr", TaskFamily.ENTAILMENT, {"val": str(path)})
        with pytest.raises(ValidationError):
            ingest(manifest)


class TestValidate:
    def test_clean_set_empty_report(self):
        records = load_canonical_jsonl(FIXTURES / "vqa50" / "dataset.jsonl")
        assert validate(records) == []

    def test_duplicate_id(self):
        rows = [record_from_json(canonical_row(1)), record_from_json(canonical_row(1))]
        report = validate(rows)
        assert len(report) == 1 and "duplicate id" in report[0]

    def test_da_without_golds(self):
        record = record_from_json(
            canonical_row(family="VQA_DA", choices=[], gold_choice=None, gold_direct_answers=[])
        )
        assert any("gold_direct_answers" in v for v in validate([record]))

    def test_duplicate_choices_after_normalization(self):
        record = record_from_json(canonical_row(choices=["Grass.", "grass"], gold_choice=0))
        assert any("duplicate choices" in v for v in validate([record]))

    def test_entailment_choice_set_forced(self):
        record = record_from_json(
            canonical_row(family="ENTAILMENT", choices=[], gold_choice=2)
        )
        assert record.choices == ("yes", "no", "maybe")
        assert validate([record]) == []
        wrong = record_from_json(
            canonical_row(family="ENTAILMENT", choices=["true", "false", "unsure"], gold_choice=0)
        )
        assert any("requires choices" in v for v in validate([wrong]))
