#!/usr/bin/env python3
"""Regenerate the checked-in mock fixture corpora under tests/fixtures/.

Deterministic: every draw comes from the package's StableRng, so reruns
reproduce the files byte-for-byte. The entailment set pins its gold label
counts (yes=18, no=22, maybe=10), which tests rely on.
"""

from __future__ import annotations

import json
from pathlib import Path

from vlmcoord.core import ImageRef, InstanceRecord, TaskFamily
from vlmcoord.datasets import write_canonical_jsonl
from vlmcoord.promptkit import transform_question
from vlmcoord.util import StableRng

ROOT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

NOUNS = [
    "green grass", "blue water", "brown horse", "red bicycle", "yellow taxi",
    "wooden bench", "street lamp", "coffee mug", "stone bridge", "white boat",
    "fire hydrant", "traffic light", "palm tree", "snowy mountain", "sandy beach",
    "brick wall", "glass bottle", "leather chair", "paper kite", "metal fence",
    "pizza slice", "tennis racket", "soccer ball", "train station", "airport runway",
    "flower vase", "laptop screen", "book shelf", "orange cat", "black dog",
    "grey elephant", "small puppy", "tall giraffe", "city skyline", "river bank",
    "garden hose", "park fountain", "wooden ladder", "surf board", "ski slope",
]

SETTINGS = [
    "in a park", "near the shore", "on a city street", "inside a kitchen",
    "at the market", "under a bridge", "on a hillside", "beside the road",
    "in the stadium", "at the harbor",
]

PREMISE_OBJECTS = [
    "truck", "elephant", "bicycle", "bench", "umbrella", "suitcase", "guitar",
    "ladder", "backpack", "skateboard",
]

PREMISE_RELATIONS = [
    "is next to the window", "is far from the door", "is under the table",
    "is behind the fence", "is on the sidewalk",
]


def _write_jsonl(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(json.dumps(r, ensure_ascii=False) for r in rows) + "\n",
                    encoding="utf-8")


def _expert_answer(rng: StableRng, gold: str, choices: list[str], accuracy_pct: int) -> str:
    roll = rng.randbelow(100)
    if roll < accuracy_pct:
        return gold
    if roll < accuracy_pct + 15:
        return f"a {gold}"  # paraphrase; still maps to gold by similarity
    wrong = [c for c in choices if c != gold]
    return wrong[rng.randbelow(len(wrong))]


def build_vqa50() -> None:
    out = ROOT / "vqa50"
    rng = StableRng("vqa50-fixture")
    records: list[InstanceRecord] = []
    captions = {"OFA": [], "BLIP": []}
    answers = {"OFA": [], "BLIP": []}
    for i in range(62):
        split = "train" if i < 12 else "val"
        image = f"img_{i:03d}"
        picked = rng.sample_indices(len(NOUNS), 4)
        choices = [NOUNS[j] for j in picked]
        gold_idx = rng.randbelow(4)
        gold = choices[gold_idx]
        setting = SETTINGS[rng.randbelow(len(SETTINGS))]
        question = f"What is shown {setting} in scene {i:03d}?"
        records.append(InstanceRecord(
            id=f"q{i:03d}",
            image=ImageRef(kind="opaque_id", value=image),
            family=TaskFamily.VQA_MC,
            question=question,
            choices=tuple(choices),
            gold_choice=gold_idx,
            gold_direct_answers=(gold, gold, choices[(gold_idx + 1) % 4]),
            split=split,
        ))
        other = choices[(gold_idx + 2) % 4]
        captions["OFA"].append({"image": image, "caption": f"a photo of {gold} {setting}"})
        captions["BLIP"].append({"image": image, "caption": f"{gold} and {other} {setting}"})
        answers["OFA"].append({"image": image, "question": question,
                               "answer": _expert_answer(rng, gold, choices, 55)})
        answers["BLIP"].append({"image": image, "question": question,
                                "answer": _expert_answer(rng, gold, choices, 45)})

    write_canonical_jsonl(records, out / "dataset.jsonl")
    write_canonical_jsonl([r for r in records if r.split == "train"], out / "train.jsonl")
    write_canonical_jsonl([r for r in records if r.split == "val"], out / "val.jsonl")
    for name in ("OFA", "BLIP"):
        _write_jsonl(out / "mock" / name / "captions.jsonl", captions[name])
        _write_jsonl(out / "mock" / name / "answers.jsonl", answers[name])
    for persona, conf in (
        ("coord_oracle", {"mode": "oracle", "sidecar": "../../dataset.jsonl"}),
        ("coord_echo", {"mode": "echo-expert:OFA"}),
        ("embed", {"roles": ["embedder"]}),
    ):
        (out / "mock" / persona).mkdir(parents=True, exist_ok=True)
        (out / "mock" / persona / "mock.json").write_text(json.dumps(conf) + "\n", encoding="utf-8")


def build_entail50() -> None:
    out = ROOT / "entail50"
    rng = StableRng("entail50-fixture")
    # Pinned gold distribution over the 50 val rows: yes=18, no=22, maybe=10.
    val_golds = [0] * 18 + [1] * 22 + [2] * 10
    order = rng.sample_indices(50, 50)
    val_golds = [val_golds[i] for i in order]
    train_golds = [rng.randbelow(3) for _ in range(10)]
    golds = train_golds + val_golds

    records: list[InstanceRecord] = []
    captions = {"OFA": [], "BLIP": []}
    answers = {"OFA": [], "BLIP": []}
    labels = ("yes", "no", "maybe")
    for i, gold_idx in enumerate(golds):
        split = "train" if i < 10 else "val"
        image = f"scene_{i:03d}"
        obj = PREMISE_OBJECTS[rng.randbelow(len(PREMISE_OBJECTS))]
        relation = PREMISE_RELATIONS[rng.randbelow(len(PREMISE_RELATIONS))]
        premise = f"the {obj} {relation} in frame {i:03d}"
        records.append(InstanceRecord(
            id=f"e{i:03d}",
            image=ImageRef(kind="opaque_id", value=image),
            family=TaskFamily.ENTAILMENT,
            question=premise,
            choices=labels,
            gold_choice=gold_idx,
            split=split,
        ))
        query = transform_question(TaskFamily.ENTAILMENT, premise)
        gold = labels[gold_idx]
        captions["OFA"].append({"image": image, "caption": f"a {obj} photographed {relation.split(' ', 1)[1]}"})
        captions["BLIP"].append({"image": image, "caption": f"an image of a {obj} outdoors"})
        answers["OFA"].append({"image": image, "question": query,
                               "answer": _expert_answer(rng, gold, list(labels), 60)})
        answers["BLIP"].append({"image": image, "question": query,
                                "answer": _expert_answer(rng, gold, list(labels), 50)})

    assert [records[10 + i].gold_choice for i in range(50)].count(2) == 10
    write_canonical_jsonl(records, out / "dataset.jsonl")
    write_canonical_jsonl([r for r in records if r.split == "train"], out / "train.jsonl")
    write_canonical_jsonl([r for r in records if r.split == "val"], out / "val.jsonl")
    for name in ("OFA", "BLIP"):
        _write_jsonl(out / "mock" / name / "captions.jsonl", captions[name])
        _write_jsonl(out / "mock" / name / "answers.jsonl", answers[name])
    for persona, conf in (
        ("coord_fixed", {"mode": "fixed:maybe"}),
        ("coord_oracle", {"mode": "oracle", "sidecar": "../../dataset.jsonl"}),
        ("embed", {"roles": ["embedder"]}),
    ):
        (out / "mock" / persona).mkdir(parents=True, exist_ok=True)
        (out / "mock" / persona / "mock.json").write_text(json.dumps(conf) + "\n", encoding="utf-8")


if __name__ == "__main__":
    build_vqa50()
    build_entail50()
    print(f"fixtures written under {ROOT}")
