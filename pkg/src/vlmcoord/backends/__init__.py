"""Backend clients, response cache, fallback embedder, and the mock server."""

from .cache import ResponseCache
from .client import Client
from .fallback import FALLBACK_DIM, FallbackEmbedder, fallback_embed
from .mock import MockServer, serve_mock
from .types import BackendHandle, CacheKey, CompletionText, EmbeddingVector, cache_key

__all__ = [
    "BackendHandle",
    "CacheKey",
    "Client",
    "CompletionText",
    "EmbeddingVector",
    "FALLBACK_DIM",
    "FallbackEmbedder",
    "MockServer",
    "ResponseCache",
    "cache_key",
    "fallback_embed",
    "serve_mock",
]
