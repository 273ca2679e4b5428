"""HTTP client for the expert/coordinator/embedder wire protocol."""

from __future__ import annotations

from typing import Any

import requests

from ..core import ImageRef
from ..errors import ProtocolError, TransportError, UsageError
from .cache import ResponseCache
from .types import BackendHandle, CompletionText, EmbeddingVector, cache_key


class Client:
    """One backend endpoint with retries and response caching.

    Retries cover transport failures only: a malformed-but-delivered
    response is not transient and raises ProtocolError immediately with no
    further attempts. On persistent transport failure exactly
    1 + max_retries attempts are made.
    """

    def __init__(self, handle: BackendHandle, cache: ResponseCache | None = None) -> None:
        self.handle = handle
        self.cache = cache
        self.attempts = 0
        self.transport_calls = 0
        self._session = requests.Session()

    def _require_role(self, role: str) -> None:
        if self.handle.role != role:
            raise UsageError(f"backend {self.handle.name!r} has role {self.handle.role!r}, needs {role!r}")

    def _post(self, path: str, body: dict) -> dict:
        url = self.handle.base_url.rstrip("/") + path
        timeout = self.handle.timeout_ms / 1000.0
        last_exc: Exception | None = None
        for _ in range(1 + self.handle.max_retries):
            self.attempts += 1
            try:
                response = self._session.post(url, json=body, timeout=timeout)
            except requests.RequestException as exc:
                last_exc = exc
                continue
            self.transport_calls += 1
            try:
                data = response.json()
            except ValueError:
                raise ProtocolError(f"{self.handle.name}: non-JSON response from {path}")
            if not (200 <= response.status_code < 300):
                err = data.get("error", {}) if isinstance(data, dict) else {}
                code = err.get("code", "error")
                message = err.get("message", response.text[:200])
                raise ProtocolError(f"{self.handle.name}: {code}: {message}")
            if not isinstance(data, dict):
                raise ProtocolError(f"{self.handle.name}: response body must be a JSON object")
            return data
        raise TransportError(f"{self.handle.name}: {last_exc}")

    def _call(self, operation: str, path: str, body: dict) -> dict:
        if self.cache is not None:
            key = cache_key(self.handle.name, operation, body)
            cached = self.cache.get(key)
            if cached is not None:
                return cached
        data = self._post(path, body)
        if self.cache is not None:
            self.cache.put(key, data)
        return data

    def health(self) -> dict:
        return self._post("/v1/health", {})

    def caption(self, image: ImageRef) -> str:
        self._require_role("expert")
        body = {"image": {"kind": image.kind, "value": image.value}}
        data = self._call("caption", "/v1/caption", body)
        caption = data.get("caption")
        if not isinstance(caption, str):
            raise ProtocolError(f"{self.handle.name}: caption response missing 'caption'")
        return caption

    def plausible_answer(self, image: ImageRef, query: str) -> str:
        """query must already be task-transformed (see promptkit.transform_question)."""
        self._require_role("expert")
        body = {"image": {"kind": image.kind, "value": image.value}, "question": query}
        data = self._call("answer", "/v1/answer", body)
        answer = data.get("answer")
        if not isinstance(answer, str):
            raise ProtocolError(f"{self.handle.name}: answer response missing 'answer'")
        return answer

    def complete(self, prompt: Any, max_new_tokens: int = 30) -> CompletionText:
        """Greedy decoding is pinned in the request, never left to backend defaults."""
        self._require_role("coordinator")
        text = getattr(prompt, "value", prompt)
        body = {"prompt": text, "max_new_tokens": max_new_tokens, "greedy": True}
        data = self._call("complete", "/v1/complete", body)
        completion = data.get("completion")
        if not isinstance(completion, str):
            raise ProtocolError(f"{self.handle.name}: completion response missing 'completion'")
        return CompletionText(value=completion, backend=self.handle.name)

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        self._require_role("embedder")
        if not texts:
            raise UsageError("embed requires at least one text")
        data = self._call("embed", "/v1/embed", {"texts": list(texts)})
        vectors = data.get("vectors")
        dim = data.get("dim")
        if not isinstance(vectors, list) or not isinstance(dim, int):
            raise ProtocolError(f"{self.handle.name}: embed response missing 'vectors'/'dim'")
        if len(vectors) != len(texts):
            raise ProtocolError(f"{self.handle.name}: expected {len(texts)} vectors, got {len(vectors)}")
        out = []
        for vec in vectors:
            if len(vec) != dim:
                raise ProtocolError(f"{self.handle.name}: vector length {len(vec)} != dim {dim}")
            out.append(EmbeddingVector(values=tuple(float(x) for x in vec), dim=dim))
        return out
