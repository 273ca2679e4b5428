"""Domain types shared by every module, plus text normalization."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import UsageError


class TaskFamily(Enum):
    VQA_MC = "VQA_MC"
    VQA_DA = "VQA_DA"
    ENTAILMENT = "ENTAILMENT"
    SPATIAL = "SPATIAL"


# Families whose choice set is pinned by the task itself.
FIXED_CHOICES: dict[TaskFamily, tuple[str, ...]] = {
    TaskFamily.ENTAILMENT: ("yes", "no", "maybe"),
    TaskFamily.SPATIAL: ("yes", "no"),
}

SPLITS = ("train", "val", "test")

IMAGE_KINDS = ("path", "url", "opaque_id")


@dataclass(frozen=True, slots=True)
class ImageRef:
    """Opaque image reference; the harness never decodes pixels, backends do."""

    kind: str
    value: str


@dataclass(frozen=True, slots=True)
class InstanceRecord:
    """One benchmark item in canonical form.

    `question` holds the raw question, or the raw premise for the
    entailment/spatial families. `gold_choice` indexes into `choices`;
    `gold_direct_answers` may carry repeats (annotator votes).
    """

    id: str
    image: ImageRef
    family: TaskFamily
    question: str
    choices: tuple[str, ...] = ()
    gold_choice: int | None = None
    gold_direct_answers: tuple[str, ...] = ()
    split: str = "val"


@dataclass(frozen=True, slots=True)
class ExpertOutput:
    """One expert's caption and plausible answer for one instance."""

    expert_name: str
    caption: str
    plausible_answer: str


_WS_RUN = re.compile(r"\s+")


def normalize_text(raw: str) -> str:
    """Lowercase, collapse whitespace runs, strip ends, drop trailing periods.

    Idempotent and never lengthens the string. Deliberately minimal:
    articles and interior punctuation are left alone, since choice mapping
    relies on embedding similarity rather than string equality.
    """
    s = _WS_RUN.sub(" ", raw).strip().lower()
    return s.rstrip(" .")


def gold_answer_text(record: InstanceRecord) -> str:
    """The gold answer as text: the gold choice, or the modal direct answer.

    Direct-answer ties break in favor of the earliest occurrence.
    """
    if record.gold_choice is not None:
        return record.choices[record.gold_choice]
    if not record.gold_direct_answers:
        raise UsageError(f"record {record.id!r} has no gold answer")
    counts: dict[str, int] = {}
    for answer in record.gold_direct_answers:
        counts[answer] = counts.get(answer, 0) + 1
    best = record.gold_direct_answers[0]
    for answer, count in counts.items():
        if count > counts[best]:
            best = answer
    return best
