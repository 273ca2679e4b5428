"""Wire-facing value types for backend clients."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import UsageError
from ..util import canonical_json, sha256_hex

ROLES = ("expert", "coordinator", "embedder")


@dataclass(frozen=True, slots=True)
class BackendHandle:
    """Identity and transport policy for one backend endpoint."""

    name: str
    base_url: str
    role: str
    timeout_ms: int = 10_000
    max_retries: int = 1

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise UsageError(f"unknown backend role {self.role!r}")
        if self.timeout_ms <= 0:
            raise UsageError("timeout_ms must be > 0")
        if self.max_retries < 0:
            raise UsageError("max_retries must be >= 0")


@dataclass(frozen=True, slots=True)
class CompletionText:
    """One coordinator completion; may be empty (flagged degenerate downstream)."""

    value: str
    backend: str


@dataclass(frozen=True, slots=True)
class EmbeddingVector:
    values: tuple[float, ...]
    dim: int

    def __post_init__(self) -> None:
        if len(self.values) != self.dim or self.dim <= 0:
            raise UsageError("embedding length must equal its declared dim")


@dataclass(frozen=True, slots=True)
class CacheKey:
    """Content address of one request: identical requests map to one key."""

    backend_name: str
    operation: str
    payload_digest: str

    @property
    def filename(self) -> str:
        return sha256_hex(f"{self.backend_name}:{self.operation}:{self.payload_digest}") + ".json"


def cache_key(backend_name: str, operation: str, body: dict) -> CacheKey:
    """Key on the canonical (sorted-key) body so field order never splits entries."""
    return CacheKey(backend_name, operation, sha256_hex(canonical_json(body)))
