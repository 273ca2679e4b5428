"""Live smoke: the harness runs cola_zero coordination against the tiny models.

No accuracy expectations (random-weight models); the run must complete with
well-formed reports and at most two degenerate rows.
"""

import pytest
from PIL import Image

from vlmcoord.backends import BackendHandle
from vlmcoord.core import ImageRef, InstanceRecord, TaskFamily
from vlmcoord.datasets import DatasetManifest, write_canonical_jsonl
from vlmcoord.evalharness import Mode, RunConfig, run_pipeline
from vlmcoord.util import StableRng

COLORS = {
    "crimson red": (180, 30, 40),
    "ocean blue": (20, 80 , 190),
    "forest green": (30, 140, 60),
    "golden yellow": (220, 180, 40),
    "deep purple": (90, 30, 140),
    "burnt orange": (200, 110, 30),
}


@pytest.fixture(scope="module")
def aokvqa_style_dataset(tmp_path_factory):
    """24 canonical multiple-choice items (20 val + 4 train) with real PNGs."""
    root = tmp_path_factory.mktemp("smoke")
    rng = StableRng("smoke-images")
    names = list(COLORS)
    records = []
    for i in range(24):
        split = "train" if i < 4 else "val"
        picked = rng.sample_indices(len(names), 4)
        choices = [names[j] for j in picked]
        gold_idx = rng.randbelow(4)
        path = root / f"tile_{i:03d}.png"
        Image.new("RGB", (64, 64), COLORS[choices[gold_idx]]).save(path)
        records.append(InstanceRecord(
            id=f"s{i:03d}",
            image=ImageRef("path", str(path)),
            family=TaskFamily.VQA_MC,
            question=f"What color fills tile {i:03d}?",
            choices=tuple(choices),
            gold_choice=gold_idx,
            split=split,
        ))
    write_canonical_jsonl([r for r in records if r.split == "train"], root / "train.jsonl")
    write_canonical_jsonl([r for r in records if r.split == "val"], root / "val.jsonl")
    return root


def smoke_config(tiny_server, dataset_root, cache_dir, k: int) -> RunConfig:
    handle = lambda name, role, persona: BackendHandle(
        name=name, base_url=tiny_server.persona_url(persona), role=role, timeout_ms=60_000
    )
    return RunConfig(
        dataset=DatasetManifest(
            name="custom",
            family=TaskFamily.VQA_MC,
            paths={"train": str(dataset_root / "train.jsonl"),
                   "val": str(dataset_root / "val.jsonl")},
        ),
        panel=(handle("OFA", "expert", "OFA"), handle("BLIP", "expert", "BLIP")),
        coordinator=handle("coord", "coordinator", "coordinator"),
        embedder=handle("embed", "embedder", "embedder"),
        mode=Mode("cola_zero", k=k),
        cache_dir=str(cache_dir),
        fanout_width=4,
        seed=1,
    )


@pytest.mark.parametrize("k", [0, 2])
def test_cola_zero_live_smoke(tiny_server, aokvqa_style_dataset, tmp_path, k):
    cfg = smoke_config(tiny_server, aokvqa_style_dataset, tmp_path / f"cache{k}", k)
    report = run_pipeline(cfg)
    assert report.metrics["n_evaluated"] == 20
    assert report.metrics["n_skipped"] == 0
    assert report.metrics["n_degenerate"] <= 2
    assert "mc_accuracy" in report.metrics
    for row in report.per_instance:
        assert row["errors"] == []
        assert row["prompt_fingerprint"]
        assert isinstance(row["completion"], str)
        assert row["pick"] is not None and 0 <= row["pick"]["index"] < 4
    if k == 2:
        # exemplar blocks make the prompt strictly longer: three A: markers
        assert report.summary["k"] == 2
