"""Text normalization and shared domain type behavior."""

import pytest

from vlmcoord.core import ImageRef, InstanceRecord, TaskFamily, gold_answer_text, normalize_text
from vlmcoord.errors import UsageError
from vlmcoord.util import StableRng


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("  Grass. ", "grass"),
        ("no  parking", "no parking"),
        ("Riding a HORSE", "riding a horse"),
        ("", ""),
        ("   ", ""),
        ("A.M. radio.", "a.m. radio"),
        ("tabs\tand\nnewlines", "tabs and newlines"),
    ],
)
def test_normalize_examples(raw, expected):
    assert normalize_text(raw) == expected


def test_normalize_idempotent_and_never_longer():
    rng = StableRng("normalize-prop")
    alphabet = "aB .\t\nz.!?"
    for _ in range(500):
        length = rng.randbelow(20)
        raw = "".join(alphabet[rng.randbelow(len(alphabet))] for _ in range(length))
        once = normalize_text(raw)
        assert normalize_text(once) == once
        assert len(once) <= len(raw)


def _record(**kwargs):
    base = dict(
        id="r1",
        image=ImageRef("opaque_id", "img"),
        family=TaskFamily.VQA_MC,
        question="what?",
        choices=("grass", "water"),
        gold_choice=0,
    )
    base.update(kwargs)
    return InstanceRecord(**base)


def test_gold_answer_text_mc():
    assert gold_answer_text(_record()) == "grass"


def test_gold_answer_text_da_modal_with_tie_to_first():
    record = _record(
        family=TaskFamily.VQA_DA,
        choices=(),
        gold_choice=None,
        gold_direct_answers=("sand", "grass", "grass", "sand"),
    )
    assert gold_answer_text(record) == "sand"
    record = _record(
        family=TaskFamily.VQA_DA,
        choices=(),
        gold_choice=None,
        gold_direct_answers=("sand", "grass", "grass"),
    )
    assert gold_answer_text(record) == "grass"


def test_gold_answer_text_missing():
    record = _record(family=TaskFamily.VQA_DA, choices=(), gold_choice=None)
    with pytest.raises(UsageError):
        gold_answer_text(record)
