"""Benchmark ingestion: upstream formats to canonical records, plus validation.

Canonical interchange is JSONL, one object per line:

    {"id": "...", "image": {"kind": "path|url|opaque_id", "value": "..."},
     "family": "VQA_MC|VQA_DA|ENTAILMENT|SPATIAL", "question": "...",
     "choices": [...], "gold_choice": int|null,
     "gold_direct_answers": [...], "split": "train|val|test"}

Upstream adapters are best-effort field mappings; fields the pipeline never
consumes (e.g. rationales) are dropped.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .core import FIXED_CHOICES, IMAGE_KINDS, SPLITS, ImageRef, InstanceRecord, TaskFamily, normalize_text
from .errors import ParseError, ValidationError

ADAPTERS = ("custom", "aokvqa", "okvqa", "vqav2", "esnlive", "vsr", "gqa", "clevr")


@dataclass(frozen=True, slots=True)
class DatasetManifest:
    """Which adapter to use and where each split lives."""

    name: str
    family: TaskFamily
    paths: dict[str, str]
    image_root: str | None = None


def record_to_json(record: InstanceRecord) -> dict:
    return {
        "id": record.id,
        "image": {"kind": record.image.kind, "value": record.image.value},
        "family": record.family.value,
        "question": record.question,
        "choices": list(record.choices),
        "gold_choice": record.gold_choice,
        "gold_direct_answers": list(record.gold_direct_answers),
        "split": record.split,
    }


def record_from_json(row: dict, default_split: str = "val") -> InstanceRecord:
    image = row.get("image") or {}
    family = TaskFamily(row["family"])
    choices = [str(c) for c in row.get("choices") or []]
    if not choices and family in FIXED_CHOICES:
        choices = list(FIXED_CHOICES[family])
    return InstanceRecord(
        id=str(row["id"]),
        image=ImageRef(kind=image.get("kind", "opaque_id"), value=str(image.get("value", ""))),
        family=family,
        question=str(row["question"]),
        choices=tuple(choices),
        gold_choice=row.get("gold_choice"),
        gold_direct_answers=tuple(str(a) for a in row.get("gold_direct_answers") or []),
        split=row.get("split", default_split),
    )


def _image_ref(value: str, image_root: str | None) -> ImageRef:
    if image_root:
        return ImageRef(kind="path", value=str(Path(image_root) / value))
    return ImageRef(kind="opaque_id", value=value)


def _rows_from_file(path: Path) -> Iterable[tuple[int, dict]]:
    """Yield (line, row) pairs from JSONL, a JSON array, or known wrappers."""
    if path.suffix == ".json":
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}") from exc
        if isinstance(payload, dict):
            payload = payload.get("questions") or payload.get("annotations") or list(payload.values())
        if not isinstance(payload, list):
            raise ParseError(f"{path}: expected a JSON array of rows")
        for i, row in enumerate(payload):
            yield i + 1, row
        return
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            yield lineno, json.loads(line)
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc


def _adapt_custom(row: dict, split: str, lineno: int, image_root: str | None) -> InstanceRecord:
    return record_from_json(row, default_split=split)


def _adapt_aokvqa(row: dict, split: str, lineno: int, image_root: str | None) -> InstanceRecord:
    """A-OKVQA rows: question_id, image_id, question, choices, correct_choice_idx,
    direct_answers. Rationales and difficulty flags are dropped."""
    return InstanceRecord(
        id=str(row.get("question_id", lineno)),
        image=_image_ref(str(row["image_id"]), image_root),
        family=TaskFamily.VQA_MC,
        question=str(row["question"]),
        choices=tuple(str(c) for c in row["choices"]),
        gold_choice=int(row["correct_choice_idx"]),
        gold_direct_answers=tuple(str(a) for a in row.get("direct_answers") or []),
        split=split,
    )


def _adapt_vqa_direct(row: dict, split: str, lineno: int, image_root: str | None) -> InstanceRecord:
    """OK-VQA / VQA v2 rows merged to one object per question.

    Upstream ships separate questions/annotations files; this adapter expects
    them joined on question_id, with `answers` either the upstream list of
    {"answer": ...} vote objects or a plain list of strings.
    """
    answers = row.get("answers") or []
    votes = tuple(str(a["answer"]) if isinstance(a, dict) else str(a) for a in answers)
    return InstanceRecord(
        id=str(row.get("question_id", lineno)),
        image=_image_ref(str(row["image_id"]), image_root),
        family=TaskFamily.VQA_DA,
        question=str(row["question"]),
        choices=(),
        gold_choice=None,
        gold_direct_answers=votes,
        split=split,
    )


_ESNLIVE_LABELS = {"entailment": 0, "contradiction": 1, "neutral": 2}


def _adapt_esnlive(row: dict, split: str, lineno: int, image_root: str | None) -> InstanceRecord:
    """e-SNLI-VE rows: hypothesis/sentence2 vs an image premise, 3-way label.
    Hypothesis becomes the premise text; explanations are dropped."""
    label = str(row.get("gold_label", row.get("label", ""))).lower()
    if label not in _ESNLIVE_LABELS:
        raise ParseError(f"line {lineno}: unknown e-SNLI-VE label {label!r}")
    image = str(row.get("Flickr30K_ID", row.get("Flickr30kID", row.get("image", ""))))
    return InstanceRecord(
        id=str(row.get("pairID", row.get("id", lineno))),
        image=_image_ref(image, image_root),
        family=TaskFamily.ENTAILMENT,
        question=str(row.get("sentence2", row.get("hypothesis", ""))),
        choices=FIXED_CHOICES[TaskFamily.ENTAILMENT],
        gold_choice=_ESNLIVE_LABELS[label],
        split=split,
    )


def _adapt_vsr(row: dict, split: str, lineno: int, image_root: str | None) -> InstanceRecord:
    """VSR rows: a spatial caption with a boolean label (1 = relation holds)."""
    return InstanceRecord(
        id=str(row.get("id", lineno)),
        image=_image_ref(str(row.get("image", row.get("image_link", ""))), image_root),
        family=TaskFamily.SPATIAL,
        question=str(row["caption"]),
        choices=FIXED_CHOICES[TaskFamily.SPATIAL],
        gold_choice=0 if int(row["label"]) == 1 else 1,
        split=split,
    )


def _single_answer_direct(
    id_keys: Sequence[str], image_keys: Sequence[str]
) -> Callable[[dict, str, int, str | None], InstanceRecord]:
    def adapt(row: dict, split: str, lineno: int, image_root: str | None) -> InstanceRecord:
        record_id = next((str(row[k]) for k in id_keys if k in row), str(lineno))
        image = next((str(row[k]) for k in image_keys if k in row), "")
        answer = str(row["answer"])
        # One annotator upstream: replicate x3 so the soft DA score is exact match.
        return InstanceRecord(
            id=record_id,
            image=_image_ref(image, image_root),
            family=TaskFamily.VQA_DA,
            question=str(row["question"]),
            gold_direct_answers=(answer, answer, answer),
            split=split,
        )

    return adapt


_ADAPTER_FUNCS: dict[str, Callable[[dict, str, int, str | None], InstanceRecord]] = {
    "custom": _adapt_custom,
    "aokvqa": _adapt_aokvqa,
    "okvqa": _adapt_vqa_direct,
    "vqav2": _adapt_vqa_direct,
    "esnlive": _adapt_esnlive,
    "vsr": _adapt_vsr,
    "gqa": _single_answer_direct(("id", "question_id"), ("imageId", "image_id", "image")),
    "clevr": _single_answer_direct(("question_index", "id"), ("image_filename", "image")),
}

_ADAPTER_FAMILIES: dict[str, tuple[TaskFamily, ...]] = {
    "custom": tuple(TaskFamily),
    "aokvqa": (TaskFamily.VQA_MC,),
    "okvqa": (TaskFamily.VQA_DA,),
    "vqav2": (TaskFamily.VQA_DA,),
    "esnlive": (TaskFamily.ENTAILMENT,),
    "vsr": (TaskFamily.SPATIAL,),
    "gqa": (TaskFamily.VQA_DA,),
    "clevr": (TaskFamily.VQA_DA,),
}


def ingest(manifest: DatasetManifest) -> dict[str, list[InstanceRecord]]:
    """Load every split in the manifest, strictly validated, file order kept."""
    if manifest.name not in _ADAPTER_FUNCS:
        raise ValidationError(f"unknown dataset adapter {manifest.name!r}")
    if manifest.family not in _ADAPTER_FAMILIES[manifest.name]:
        raise ValidationError(
            f"adapter {manifest.name!r} produces {_ADAPTER_FAMILIES[manifest.name]}, "
            f"manifest declares {manifest.family}"
        )
    adapt = _ADAPTER_FUNCS[manifest.name]
    out: dict[str, list[InstanceRecord]] = {}
    for split, path_str in manifest.paths.items():
        if split not in SPLITS:
            raise ValidationError(f"unknown split {split!r} in manifest")
        path = Path(path_str)
        if not path.exists():
            raise ValidationError(f"split file {path} does not exist")
        records = []
        for lineno, row in _rows_from_file(path):
            try:
                record = adapt(row, split, lineno, manifest.image_root)
            except ParseError:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc!r}") from exc
            if record.family is not manifest.family:
                raise ValidationError(
                    f"{path}:{lineno}: record family {record.family} != manifest {manifest.family}"
                )
            if record.split != split:
                raise ValidationError(
                    f"{path}:{lineno}: row split {record.split!r} under manifest split {split!r}"
                )
            records.append(record)
        violations = validate(records)
        if violations:
            raise ValidationError(f"{path}: " + "; ".join(violations))
        out[split] = records
    return out


def validate(records: Sequence[InstanceRecord]) -> list[str]:
    """Pure invariant check; returns one message per violation."""
    violations = []
    seen: dict[tuple[str, str], str] = {}
    for record in records:
        key = (record.split, record.id)
        if key in seen:
            violations.append(f"duplicate id {record.id!r} in split {record.split!r}")
        seen[key] = record.id
        if record.split not in SPLITS:
            violations.append(f"{record.id}: unknown split {record.split!r}")
        if record.image.kind not in IMAGE_KINDS:
            violations.append(f"{record.id}: unknown image kind {record.image.kind!r}")
        if not record.image.value:
            violations.append(f"{record.id}: empty image reference")
        if not record.question.strip():
            violations.append(f"{record.id}: empty question")
        if record.gold_choice is not None and not 0 <= record.gold_choice < len(record.choices):
            violations.append(f"{record.id}: gold_choice {record.gold_choice} out of range")
        family = record.family
        if family in FIXED_CHOICES and record.choices != FIXED_CHOICES[family]:
            violations.append(f"{record.id}: {family.value} requires choices {FIXED_CHOICES[family]}")
        if family is TaskFamily.VQA_MC:
            if record.gold_choice is None:
                violations.append(f"{record.id}: VQA_MC requires gold_choice")
            if len(record.choices) < 2:
                violations.append(f"{record.id}: VQA_MC requires >= 2 choices")
            normalized = [normalize_text(c) for c in record.choices]
            if len(set(normalized)) != len(normalized):
                violations.append(f"{record.id}: duplicate choices after normalization")
        if family is TaskFamily.VQA_DA and not record.gold_direct_answers:
            violations.append(f"{record.id}: VQA_DA requires gold_direct_answers")
    return violations


def load_canonical_jsonl(path: Path | str, default_split: str = "val") -> list[InstanceRecord]:
    path = Path(path)
    records = []
    for lineno, row in _rows_from_file(path):
        try:
            records.append(record_from_json(row, default_split=default_split))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc!r}") from exc
    return records


def write_canonical_jsonl(records: Iterable[InstanceRecord], path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(record_to_json(r), ensure_ascii=False) for r in records]
    path.write_text("\n".join(lines) + "\n" if lines else "", encoding="utf-8")
