"""Map free-text completions onto choice sets and combine per-model scores."""

from __future__ import annotations

import math
from dataclasses import dataclass
from operator import mul
from typing import Any, Iterable, Sequence

from .backends.types import EmbeddingVector
from .core import normalize_text
from .errors import DegenerateInput, UsageError

DEGENERATE_SCORE = -1.0


@dataclass(frozen=True, slots=True)
class ScoreDistribution:
    """Per-choice similarity scores; cosines, so no sum-to-1 requirement."""

    choice_texts: tuple[str, ...]
    scores: tuple[float, ...]
    source: str

    def __post_init__(self) -> None:
        if len(self.choice_texts) != len(self.scores):
            raise UsageError("choice_texts and scores must align")


@dataclass(frozen=True, slots=True)
class ChoicePick:
    index: int
    text: str
    score: float


def is_degenerate(pick: ChoicePick) -> bool:
    return pick.score == DEGENERATE_SCORE


def cosine(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """Cosine similarity, clamped into [-1, 1] against rounding drift."""
    if u.dim != v.dim:
        raise UsageError(f"dimension mismatch: {u.dim} != {v.dim}")
    dot = sum(map(mul, u.values, v.values))
    nu = math.sqrt(sum(map(mul, u.values, u.values)))
    nv = math.sqrt(sum(map(mul, v.values, v.values)))
    if nu == 0.0 or nv == 0.0:
        raise DegenerateInput("cosine of a zero vector")
    return max(-1.0, min(1.0, dot / (nu * nv)))


def _argmax(scores: Sequence[float]) -> int:
    best = 0
    for i in range(1, len(scores)):
        if scores[i] > scores[best]:
            best = i
    return best


def map_to_choice(completion: Any, choices: Sequence[str], embedder) -> tuple[ScoreDistribution, ChoicePick]:
    """Score a completion against every choice and pick the best.

    Completion and choices are normalized and embedded in one batch. The
    pick is the cosine argmax (ties to the lowest index), except that a
    normalized completion exactly equal to a normalized choice picks that
    choice directly with score 1.0, making the equality contract exact even
    under a noisy or degenerate embedder.

    A completion that normalizes to empty is degenerate: pick index 0 with
    the -1.0 sentinel score, for the caller to flag in its trace.
    """
    if not choices:
        raise UsageError("map_to_choice requires a non-empty choice list")
    text = getattr(completion, "value", completion)
    source = getattr(completion, "backend", "text")
    norm_completion = normalize_text(text)
    norm_choices = [normalize_text(c) for c in choices]
    if norm_completion == "":
        dist = ScoreDistribution(tuple(choices), (DEGENERATE_SCORE,) * len(choices), source)
        return dist, ChoicePick(0, choices[0], DEGENERATE_SCORE)

    vectors = embedder.embed([norm_completion] + norm_choices)
    scores = []
    for vec in vectors[1:]:
        try:
            scores.append(cosine(vectors[0], vec))
        except DegenerateInput:
            scores.append(DEGENERATE_SCORE)
    dist = ScoreDistribution(tuple(choices), tuple(scores), source)

    for i, choice in enumerate(norm_choices):
        if choice == norm_completion:
            return dist, ChoicePick(i, choices[i], 1.0)
    index = _argmax(scores)
    return dist, ChoicePick(index, choices[index], scores[index])


def ensemble_average(dists: Sequence[ScoreDistribution]) -> ScoreDistribution:
    """Elementwise arithmetic mean over models; choice order must align exactly."""
    if not dists:
        raise UsageError("ensemble_average requires at least one distribution")
    choices = dists[0].choice_texts
    for d in dists[1:]:
        if d.choice_texts != choices:
            raise UsageError("ensemble_average requires identical choice order")
    n = len(dists)
    scores = tuple(math.fsum(d.scores[i] for d in dists) / n for i in range(len(choices)))
    return ScoreDistribution(choices, scores, "ensemble-avg")


def majority_vote(picks: Sequence[ChoicePick], fallback_order: Iterable[int] | None = None) -> ChoicePick:
    """Plurality winner over per-model picks.

    Ties break in favor of the tied index supported by the earliest model in
    fallback_order (positions into `picks`, defaulting to given order), and
    the winning model's own pick object is returned.
    """
    if not picks:
        raise UsageError("majority_vote requires at least one pick")
    order = list(fallback_order) if fallback_order is not None else list(range(len(picks)))
    rank = {position: r for r, position in enumerate(order)}
    supporters: dict[int, list[int]] = {}
    for position, pick in enumerate(picks):
        supporters.setdefault(pick.index, []).append(position)
    best_index = None
    best_key = None
    for index, positions in supporters.items():
        earliest = min(rank.get(p, len(picks)) for p in positions)
        key = (-len(positions), earliest)
        if best_key is None or key < best_key:
            best_key = key
            best_index = index
    winner_position = min(supporters[best_index], key=lambda p: rank.get(p, len(picks)))
    return picks[winner_position]
