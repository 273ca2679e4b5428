"""Byte-exact prompt assembly, question transformation, exemplar sampling,
and label perturbations for the ablation matrix."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .core import ExpertOutput, InstanceRecord, TaskFamily, gold_answer_text
from .errors import UsageError
from .util import StableRng, sha256_hex, unit_coin

PERTURBATION_MODES = (
    "none",
    "swap_caption_labels",
    "swap_answer_labels",
    "drop_captions",
    "drop_answers",
    "single_expert",
)

PHASES = ("tune", "eval")

_NUMBER_WORDS = {
    2: "two", 3: "three", 4: "four", 5: "five", 6: "six",
    7: "seven", 8: "eight", 9: "nine", 10: "ten",
}


@dataclass(frozen=True, slots=True)
class PromptTemplate:
    family: TaskFamily
    expert_names: tuple[str, ...]
    include_captions: bool = True
    include_answers: bool = True
    include_choices: bool = True


@dataclass(frozen=True, slots=True)
class PromptText:
    value: str
    fingerprint: str

    @classmethod
    def of(cls, value: str) -> "PromptText":
        return cls(value=value, fingerprint=sha256_hex(value))


@dataclass(frozen=True, slots=True)
class Exemplar:
    """A train-split record with its expert outputs and gold answer text."""

    record: InstanceRecord
    outputs: tuple[ExpertOutput, ...]
    gold_text: str


@dataclass(frozen=True, slots=True)
class PerturbationSpec:
    """Controlled corruption of expert outputs for ablations.

    `probability` applies to the swap modes only; the coin is drawn per
    (seed, instance id, phase) so results are independent of iteration
    order. `phases` scopes the perturbation: the answer-swap-at-eval-only
    ablation is {mode: swap_answer_labels, probability: 1.0, phases: (eval,)}.
    """

    mode: str = "none"
    probability: float = 0.0
    seed: int = 0
    expert: str | None = None
    phases: tuple[str, ...] = ("tune", "eval")

    def __post_init__(self) -> None:
        if self.mode not in PERTURBATION_MODES:
            raise UsageError(f"unknown perturbation mode {self.mode!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise UsageError("perturbation probability must be in [0, 1]")
        if self.mode == "single_expert" and not self.expert:
            raise UsageError("single_expert perturbation needs an expert name")
        for phase in self.phases:
            if phase not in PHASES:
                raise UsageError(f"unknown perturbation phase {phase!r}")


NO_PERTURBATION = PerturbationSpec()


def _join_names(names: Sequence[str]) -> str:
    if len(names) == 1:
        return names[0]
    return ", ".join(names[:-1]) + " and " + names[-1]


def instruction_sentence(expert_names: Sequence[str]) -> str:
    """The fixed two-sentence header, expert names substituted in."""
    if not expert_names:
        raise UsageError("instruction sentence needs at least one expert")
    joined = _join_names(expert_names)
    if len(expert_names) == 1:
        return (
            f"Answer the following multiple-choice question by {joined}'s description "
            f"and its answer to the visual question. {joined} is a vision-language "
            "model to provide clues."
        )
    count = _NUMBER_WORDS.get(len(expert_names), str(len(expert_names)))
    return (
        f"Answer the following multiple-choice question by {joined}'s description "
        f"and their answers to the visual question. {joined} are {count} different "
        "vision-language models to provide clues."
    )


def transform_question(family: TaskFamily, raw: str) -> str:
    """Task-specific query rewrite before prompting experts.

    VQA questions pass through unchanged; entailment and spatial premises are
    wrapped in the literal ` does the image describe "<premise>" ?` template,
    leading space and all.
    """
    if family in (TaskFamily.ENTAILMENT, TaskFamily.SPATIAL):
        return f' does the image describe "{raw}" ?'
    return raw


def _q_line(query: str) -> str:
    # Transformed entailment queries carry their own leading space.
    return "Q:" + query if query.startswith(" ") else "Q: " + query


def _render_block(
    tpl: PromptTemplate,
    outputs: Sequence[ExpertOutput],
    query: str,
    choices: Sequence[str],
    answer: str | None,
) -> str:
    lines = [instruction_sentence(tpl.expert_names), ""]
    if tpl.include_captions:
        lines += [f"{o.expert_name}'s description: {o.caption}" for o in outputs]
        lines.append("")
    lines += [_q_line(query), ""]
    if tpl.include_answers:
        lines += [f"{o.expert_name}'s answer: {o.plausible_answer}" for o in outputs]
        lines.append("")
    if tpl.include_choices:
        lines += ["Choices: [" + ", ".join(choices) + "]", ""]
    lines.append("A:" if answer is None else f"A: {answer}")
    return "\n".join(lines)


def _check_alignment(tpl: PromptTemplate, outputs: Sequence[ExpertOutput]) -> None:
    if len(outputs) != len(tpl.expert_names):
        raise UsageError(
            f"{len(outputs)} outputs for {len(tpl.expert_names)} experts {tpl.expert_names}"
        )
    for output, name in zip(outputs, tpl.expert_names):
        if output.expert_name != name:
            raise UsageError(f"output for {output.expert_name!r} out of order, expected {name!r}")


def build_prompt(
    tpl: PromptTemplate,
    outputs: Sequence[ExpertOutput],
    query: str,
    choices: Sequence[str],
    exemplars: Sequence[Exemplar] = (),
    perturb: PerturbationSpec = NO_PERTURBATION,
) -> PromptText:
    """Assemble the coordinator prompt; pure, so equal inputs fingerprint equal.

    `outputs` must already carry any eval-phase perturbation; exemplar blocks
    are perturbed here with each exemplar's own id. Each exemplar renders the
    full block with its gold appended after "A:", then one blank line, ahead
    of the query block.
    """
    if not tpl.include_captions and not tpl.include_answers:
        raise UsageError("template must render captions, answers, or both")
    if tpl.include_choices and not choices:
        raise UsageError("template includes choices but none were given")
    _check_alignment(tpl, outputs)
    blocks = []
    for exemplar in exemplars:
        ex_outputs = apply_perturbation(exemplar.outputs, perturb, "eval", exemplar.record.id)
        _check_alignment(tpl, ex_outputs)
        ex_query = transform_question(exemplar.record.family, exemplar.record.question)
        blocks.append(
            _render_block(tpl, ex_outputs, ex_query, exemplar.record.choices, exemplar.gold_text)
        )
    blocks.append(_render_block(tpl, outputs, query, choices, None))
    return PromptText.of("\n\n".join(blocks))


def sample_exemplars(
    train: Sequence[InstanceRecord],
    k: int,
    seed: int,
    exclude_id: str | None = None,
) -> list[InstanceRecord]:
    """Uniform draw without replacement, seeded and platform-stable.

    Returns records in draw order; the caller fetches expert outputs and
    builds Exemplar objects (see make_exemplar).
    """
    pool = [r for r in train if r.id != exclude_id]
    if k < 0:
        raise UsageError("k must be >= 0")
    if k > len(pool):
        raise UsageError(f"k={k} exceeds the {len(pool)} available train records")
    if k == 0:
        return []
    rng = StableRng("exemplars", seed, exclude_id or "")
    return [pool[i] for i in rng.sample_indices(len(pool), k)]


def make_exemplar(record: InstanceRecord, outputs: Sequence[ExpertOutput]) -> Exemplar:
    if record.split != "train":
        raise UsageError(f"exemplar {record.id!r} must come from the train split")
    return Exemplar(record=record, outputs=tuple(outputs), gold_text=gold_answer_text(record))


def apply_perturbation(
    outputs: Sequence[ExpertOutput],
    perturb: PerturbationSpec,
    phase: str,
    instance_id: str,
) -> list[ExpertOutput]:
    """Perturb one instance's expert outputs for the given phase.

    Swap modes exchange which expert name owns which caption (or answer)
    with the seeded per-instance coin; drop modes blank the field;
    single_expert filters the panel down to one expert.
    """
    if phase not in PHASES:
        raise UsageError(f"unknown phase {phase!r}")
    outputs = list(outputs)
    if perturb.mode == "none" or phase not in perturb.phases:
        return outputs
    if perturb.mode == "single_expert":
        kept = [o for o in outputs if o.expert_name == perturb.expert]
        if not kept:
            raise UsageError(f"single_expert {perturb.expert!r} not in panel")
        return kept
    if perturb.mode == "drop_captions":
        return [replace(o, caption="") for o in outputs]
    if perturb.mode == "drop_answers":
        return [replace(o, plausible_answer="") for o in outputs]
    if len(outputs) != 2:
        raise UsageError("label swaps are pairwise; panel must have exactly 2 experts")
    first, second = outputs
    if unit_coin("perturb", perturb.seed, instance_id, phase) >= perturb.probability:
        return outputs
    if perturb.mode == "swap_caption_labels":
        return [
            replace(first, caption=second.caption),
            replace(second, caption=first.caption),
        ]
    return [
        replace(first, plausible_answer=second.plausible_answer),
        replace(second, plausible_answer=first.plausible_answer),
    ]
