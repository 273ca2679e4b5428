"""Deterministic hashing, canonical JSON, and platform-stable sampling."""

from __future__ import annotations

import hashlib
import json
from typing import Any

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF


def canonical_json(obj: Any) -> str:
    """Serialize with sorted keys and no whitespace so equal payloads hash equal."""
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def sha256_hex(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def fnv1a_64(data: bytes) -> int:
    """FNV-1a 64-bit hash; pinned constants, identical on every platform."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64
    return h


def unit_coin(*parts: Any) -> float:
    """Uniform float in [0, 1) derived from the parts via sha256."""
    material = ":".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


class StableRng:
    """Counter-mode sha256 stream yielding identical draws on every platform.

    The stdlib Mersenne generator is not pinned across interpreter versions
    for compound operations like sample(), so seeded reproducibility that the
    run configs promise is built on a hash stream instead.
    """

    def __init__(self, *seed_parts: Any) -> None:
        self._key = ":".join(str(p) for p in seed_parts)
        self._counter = 0

    def _next_u64(self) -> int:
        digest = hashlib.sha256(f"{self._key}:{self._counter}".encode("utf-8")).digest()
        self._counter += 1
        return int.from_bytes(digest[:8], "big")

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow needs n > 0")
        limit = (2**64 // n) * n
        while True:
            value = self._next_u64()
            if value < limit:
                return value % n

    def sample_indices(self, population: int, k: int) -> list[int]:
        """k distinct indices from range(population), order as drawn."""
        if k > population:
            raise ValueError("sample larger than population")
        indices = list(range(population))
        for i in range(k):
            j = i + self.randbelow(population - i)
            indices[i], indices[j] = indices[j], indices[i]
        return indices[:k]
