#!/usr/bin/env python3
"""Regenerate tests/fixtures/toy_tuning.jsonl through the harness exporter.

Builds a 100-record train split with a small answer vocabulary, serves
matching mock experts in-process, and runs the real export_tuning_set so the
fixture is a genuine export artifact. Deterministic end to end.
"""

from __future__ import annotations

import shutil
import tempfile
from pathlib import Path

from vlmcoord.backends import BackendHandle, serve_mock
from vlmcoord.core import ImageRef, InstanceRecord, TaskFamily
from vlmcoord.datasets import DatasetManifest, write_canonical_jsonl
from vlmcoord.evalharness import FALLBACK_EMBEDDER_URL, Mode, RunConfig, export_tuning_set
from vlmcoord.util import StableRng

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "toy_tuning.jsonl"

ANSWERS = ["green grass", "blue water", "red bicycle", "stone bridge", "orange cat", "palm tree"]


def main() -> None:
    rng = StableRng("toy-tuning")
    workdir = Path(tempfile.mkdtemp(prefix="toy-tuning-"))
    records = []
    captions = {"OFA": [], "BLIP": []}
    answers = {"OFA": [], "BLIP": []}
    for i in range(100):
        image = f"toy_{i:03d}"
        picked = rng.sample_indices(len(ANSWERS), 4)
        choices = [ANSWERS[j] for j in picked]
        gold_idx = rng.randbelow(4)
        gold = choices[gold_idx]
        question = f"What is pictured in tile {i:03d}?"
        records.append(InstanceRecord(
            id=f"t{i:03d}",
            image=ImageRef("opaque_id", image),
            family=TaskFamily.VQA_MC,
            question=question,
            choices=tuple(choices),
            gold_choice=gold_idx,
            split="train",
        ))
        captions["OFA"].append({"image": image, "caption": f"a close photo of {gold}"})
        captions["BLIP"].append({"image": image, "caption": f"{gold} in the frame"})
        answers["OFA"].append({"image": image, "question": question, "answer": gold})
        answers["BLIP"].append({"image": image, "question": question,
                                "answer": choices[(gold_idx + 1) % 4]})

    write_canonical_jsonl(records, workdir / "train.jsonl")
    import json

    for name in ("OFA", "BLIP"):
        persona = workdir / "mock" / name
        persona.mkdir(parents=True)
        (persona / "captions.jsonl").write_text(
            "\n".join(json.dumps(r) for r in captions[name]) + "\n", encoding="utf-8")
        (persona / "answers.jsonl").write_text(
            "\n".join(json.dumps(r) for r in answers[name]) + "\n", encoding="utf-8")

    server = serve_mock(workdir / "mock")
    try:
        cfg = RunConfig(
            dataset=DatasetManifest("custom", TaskFamily.VQA_MC,
                                    {"train": str(workdir / "train.jsonl")}),
            panel=(
                BackendHandle("OFA", server.persona_url("OFA"), "expert"),
                BackendHandle("BLIP", server.persona_url("BLIP"), "expert"),
            ),
            embedder=BackendHandle("fallback", FALLBACK_EMBEDDER_URL, "embedder"),
            mode=Mode("export_tuning"),
        )
        OUT.parent.mkdir(parents=True, exist_ok=True)
        export_tuning_set(cfg, OUT)
    finally:
        server.stop()
        shutil.rmtree(workdir, ignore_errors=True)
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
