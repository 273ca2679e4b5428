"""Cosine mapping, ensemble combiners, and their oracles.

Derived constants below were computed with the independent trigram-multiset
oracle (plain dicts, no hashing) before the implementation existed.
"""

import math
from collections import Counter

import pytest

from vlmcoord.backends import EmbeddingVector, FallbackEmbedder
from vlmcoord.core import normalize_text
from vlmcoord.errors import DegenerateInput, UsageError
from vlmcoord.mapping import (
    ChoicePick,
    ScoreDistribution,
    cosine,
    ensemble_average,
    is_degenerate,
    majority_vote,
    map_to_choice,
)
from vlmcoord.util import StableRng

EMBEDDER = FallbackEmbedder()

# Frozen oracle values (tests/fixtures provenance: brute-force trigram dicts).
COS_NO_PARKING_PARKING = 0.7905694150420948
COS_NO_PARKING_KAYAKING = 0.2886751345948129
COS_NO_PARKING_ZONE = 0.7844645405527361
COS_123_456 = 0.9746318461970762


def vec(*values):
    return EmbeddingVector(values=tuple(float(v) for v in values), dim=len(values))


def oracle_trigram_cosine(a: str, b: str) -> float:
    """Independent of the bucketed implementation: raw trigram dicts."""
    ta = Counter(normalize_text(a)[i : i + 3] for i in range(len(normalize_text(a)) - 2))
    tb = Counter(normalize_text(b)[i : i + 3] for i in range(len(normalize_text(b)) - 2))
    dot = sum(ta[k] * tb[k] for k in ta)
    na = math.sqrt(sum(v * v for v in ta.values()))
    nb = math.sqrt(sum(v * v for v in tb.values()))
    return dot / (na * nb)


class TestCosine:
    def test_self_similarity(self):
        v = vec(0.3, -0.2, 9.0)
        assert cosine(v, v) == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_basis(self):
        assert cosine(vec(1, 0, 0), vec(0, 1, 0)) == 0.0

    def test_derived_value(self):
        assert cosine(vec(1, 2, 3), vec(4, 5, 6)) == pytest.approx(COS_123_456, abs=1e-12)

    def test_dim_mismatch(self):
        with pytest.raises(UsageError):
            cosine(vec(1, 2), vec(1, 2, 3))

    def test_zero_vector(self):
        with pytest.raises(DegenerateInput):
            cosine(vec(0, 0), vec(1, 1))

    def test_bounds_and_symmetry(self):
        rng = StableRng("cosine-bounds")
        for _ in range(200):
            u = vec(*[rng.randbelow(2001) - 1000 for _ in range(8)])
            v = vec(*[rng.randbelow(2001) - 1000 for _ in range(8)])
            if all(x == 0 for x in u.values) or all(x == 0 for x in v.values):
                continue
            s = cosine(u, v)
            assert -1.0 <= s <= 1.0
            assert s == cosine(v, u)


class TestFallbackTrigramCosines:
    def test_matches_independent_oracle(self):
        pairs = [("no parking", "parking"), ("no parking", "kayaking")]
        for a, b in pairs:
            u, v = EMBEDDER.embed([a, b])
            assert cosine(u, v) == pytest.approx(oracle_trigram_cosine(a, b), abs=1e-12)

    def test_frozen_constants(self):
        u, v, w = EMBEDDER.embed(["no parking", "parking", "kayaking"])
        assert cosine(u, v) == pytest.approx(COS_NO_PARKING_PARKING, abs=1e-12)
        assert cosine(u, w) == pytest.approx(COS_NO_PARKING_KAYAKING, abs=1e-12)
        assert cosine(u, v) > cosine(u, w)


class TestMapToChoice:
    def test_exact_match_short_circuit(self):
        dist, pick = map_to_choice("grass", ["water", "grass", "sand", "rocks"], EMBEDDER)
        assert (pick.index, pick.text, pick.score) == (1, "grass", 1.0)
        assert dist.choice_texts == ("water", "grass", "sand", "rocks")

    def test_exact_match_wins_over_cosine(self):
        # "Grass." normalizes to "grass": still an exact match.
        _, pick = map_to_choice("  Grass. ", ["water", "grass"], EMBEDDER)
        assert pick.index == 1 and pick.score == 1.0

    def test_derived_no_parking_zone(self):
        dist, pick = map_to_choice("no parking", ["kayaking", "no parking zone", "swimming"], EMBEDDER)
        assert pick.text == "no parking zone"
        assert pick.score == pytest.approx(COS_NO_PARKING_ZONE, abs=1e-12)
        oracle = [oracle_trigram_cosine("no parking", c) for c in dist.choice_texts]
        for got, want in zip(dist.scores, oracle):
            assert got == pytest.approx(want, abs=1e-12)

    def test_degenerate_completion(self):
        dist, pick = map_to_choice("   ", ["water", "grass"], EMBEDDER)
        assert (pick.index, pick.score) == (0, -1.0)
        assert is_degenerate(pick)
        assert all(s == -1.0 for s in dist.scores)

    def test_empty_choices(self):
        with pytest.raises(UsageError):
            map_to_choice("grass", [], EMBEDDER)

    def test_argmax_tie_breaks_low_index(self):
        class TwinEmbedder:
            def embed(self, texts):
                return [vec(1, 0)] * len(texts)

        _, pick = map_to_choice("xyz", ["aaa", "bbb"], TwinEmbedder())
        assert pick.index == 0

    def test_permutation_equivariance(self):
        choices = ["palm tree", "train station", "coffee mug", "white boat"]
        dist, pick = map_to_choice("a coffee cup", choices, EMBEDDER)
        rng = StableRng("perm")
        for _ in range(25):
            perm = rng.sample_indices(len(choices), len(choices))
            permuted = [choices[i] for i in perm]
            pdist, ppick = map_to_choice("a coffee cup", permuted, EMBEDDER)
            assert list(pdist.scores) == [dist.scores[i] for i in perm]
            assert ppick.text == pick.text


class TestEnsembleAverage:
    def test_identity_for_one(self):
        dist = ScoreDistribution(("a", "b"), (0.2, 0.8), "OFA")
        merged = ensemble_average([dist])
        assert merged.scores == dist.scores
        assert merged.source == "ensemble-avg"

    def test_arithmetic(self):
        a = ScoreDistribution(("x", "y"), (0.2, 0.8), "OFA")
        b = ScoreDistribution(("x", "y"), (0.6, 0.4), "BLIP")
        assert ensemble_average([a, b]).scores == pytest.approx((0.4, 0.6), abs=1e-12)

    def test_against_summation_oracle(self):
        rng = StableRng("ensemble-oracle")
        choices = ("c0", "c1", "c2")
        for _ in range(200):
            dists = [
                ScoreDistribution(
                    choices,
                    tuple((rng.randbelow(2001) - 1000) / 1000 for _ in choices),
                    f"m{j}",
                )
                for j in range(1 + rng.randbelow(5))
            ]
            merged = ensemble_average(dists)
            for i in range(len(choices)):
                total = 0.0
                for d in dists:
                    total += d.scores[i]
                assert merged.scores[i] == pytest.approx(total / len(dists), abs=1e-12)

    def test_misaligned_choices(self):
        a = ScoreDistribution(("x", "y"), (0.2, 0.8), "OFA")
        b = ScoreDistribution(("y", "x"), (0.6, 0.4), "BLIP")
        with pytest.raises(UsageError):
            ensemble_average([a, b])

    def test_panel_order_invariance(self):
        a = ScoreDistribution(("x", "y"), (0.25, 0.5), "OFA")
        b = ScoreDistribution(("x", "y"), (0.75, 0.1), "BLIP")
        assert ensemble_average([a, b]) == ensemble_average([b, a])


class TestMajorityVote:
    def test_plurality(self):
        picks = [ChoicePick(0, "a", 0.9), ChoicePick(0, "a", 0.5), ChoicePick(1, "b", 0.8)]
        assert majority_vote(picks).index == 0

    def test_tie_breaks_to_earliest_expert(self):
        picks = [ChoicePick(0, "a", 0.4), ChoicePick(1, "b", 0.9)]
        assert majority_vote(picks).index == 0
        assert majority_vote(picks, fallback_order=[1, 0]).index == 1

    def test_two_two_one_split(self):
        # Derived by enumeration: indices 1 and 2 tie at two votes each; the
        # earliest supporter of index 2 (position 1) precedes index 1's (position 2).
        picks = [
            ChoicePick(0, "a", 0.1),
            ChoicePick(2, "c", 0.2),
            ChoicePick(1, "b", 0.3),
            ChoicePick(2, "c", 0.4),
            ChoicePick(1, "b", 0.5),
        ]
        winner = majority_vote(picks)
        assert winner.index == 2
        assert winner.score == 0.2

    def test_empty(self):
        with pytest.raises(UsageError):
            majority_vote([])
