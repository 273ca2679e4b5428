"""Deterministic offline embedder: hashed character trigrams.

A stand-in for a sentence-embedding backend so the test suite and mock
pipelines need no model. Vectors are L2-normalized bucket counts of the
normalized text's character trigrams; buckets come from FNV-1a 64 mod the
fixed dimension, so vectors are bit-identical across platforms.
"""

from __future__ import annotations

import math

from ..core import normalize_text
from ..errors import UsageError
from ..util import fnv1a_64
from .types import EmbeddingVector

FALLBACK_DIM = 1024


def _bucket(trigram: str) -> int:
    return fnv1a_64(trigram.encode("utf-8")) % FALLBACK_DIM


def fallback_embed(text: str) -> EmbeddingVector:
    """Embed one string; texts shorter than one trigram yield the zero vector."""
    s = normalize_text(text)
    counts: dict[int, int] = {}
    for i in range(len(s) - 2):
        b = _bucket(s[i : i + 3])
        counts[b] = counts.get(b, 0) + 1
    values = [0.0] * FALLBACK_DIM
    norm = math.sqrt(sum(c * c for c in counts.values()))
    if norm:
        for b, c in counts.items():
            values[b] = c / norm
    return EmbeddingVector(values=tuple(values), dim=FALLBACK_DIM)


class FallbackEmbedder:
    """Batch interface matching the remote embedder clients."""

    dim = FALLBACK_DIM

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        if not texts:
            raise UsageError("embed requires at least one text")
        return [fallback_embed(t) for t in texts]
