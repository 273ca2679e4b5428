"""Tuning on the checked-in 100-pair export: loss sanity and re-serving."""

import json
import math
from pathlib import Path

import pytest
import requests

from modelserve.finetune import finetune, read_tuning_file
from modelserve.models import TextGenModel
from modelserve.server import ServeConfig
from conftest import LiveServer, free_port

TOY = Path(__file__).parent / "fixtures" / "toy_tuning.jsonl"


def test_read_tuning_file_parses_meta_and_pairs():
    meta, pairs = read_tuning_file(TOY)
    assert meta["optimizer"] == "adafactor"
    assert meta["learning_rate"] == 1e-4
    assert meta["batch_size"] == 16
    assert len(pairs) == 100
    assert all(p["input"].endswith("A:") for p in pairs)


def test_malformed_line_aborts_with_line_number(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(
        '#meta {}\n{"input": "x", "target": "y"}\n{broken\n', encoding="utf-8"
    )
    with pytest.raises(ValueError, match="line 3"):
        read_tuning_file(bad)


@pytest.fixture(scope="module")
def tuned_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("tuned") / "model"
    summary = finetune(TOY, "tiny-seq2seq", out)
    return out, summary


def test_one_epoch_finite_decreasing_loss(tuned_dir):
    _, summary = tuned_dir
    assert summary["epochs"] == 1
    assert all(math.isfinite(x) for x in summary["step_losses"])
    assert math.isfinite(summary["loss_before"]) and math.isfinite(summary["loss_after"])
    assert summary["loss_after"] < summary["loss_before"]


def test_tuned_model_serves_via_protocol(tuned_dir):
    out, _ = tuned_dir
    server = LiveServer(ServeConfig(coordinator_model=str(out)), free_port()).start()
    try:
        url = server.persona_url("coordinator") + "/v1/complete"
        body = {"prompt": "Q: what is pictured?\n\nA:", "max_new_tokens": 10, "greedy": True}
        first = requests.post(url, json=body, timeout=30).json()
        second = requests.post(url, json=body, timeout=30).json()
        assert first == second
        assert isinstance(first["completion"], str)
    finally:
        server.stop()


def test_tuned_gold_rate_not_below_base(tuned_dir):
    out, _ = tuned_dir
    _, pairs = read_tuning_file(TOY)
    sample = pairs[:25]
    base = TextGenModel.load("tiny-seq2seq")
    tuned = TextGenModel.load(str(out))

    def gold_rate(model):
        hits = 0
        for pair in sample:
            completion = model.complete(pair["input"], 16)
            hits += int(completion.strip().lower() == pair["target"].strip().lower())
        return hits / len(sample)

    assert gold_rate(tuned) >= gold_rate(base)
