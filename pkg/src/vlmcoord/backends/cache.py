"""Disk-backed response cache, content-addressed by request digest."""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from .types import CacheKey


class ResponseCache:
    """Caches JSON response bodies; identical requests hit transport once.

    Entries live both in memory and (when a root is given) on disk under the
    run directory, so expensive live runs are resumable across processes.
    Writes are serialized and land via atomic rename.
    """

    def __init__(self, root: Path | str | None = None) -> None:
        self.root = Path(root) if root is not None else None
        self._memory: dict[str, dict] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        if self.root is not None:
            self.root.mkdir(parents=True, exist_ok=True)

    def get(self, key: CacheKey) -> dict | None:
        name = key.filename
        with self._lock:
            if name in self._memory:
                self.hits += 1
                return self._memory[name]
        if self.root is not None:
            path = self.root / name
            if path.exists():
                value = json.loads(path.read_text(encoding="utf-8"))
                with self._lock:
                    self._memory[name] = value
                    self.hits += 1
                return value
        with self._lock:
            self.misses += 1
        return None

    def put(self, key: CacheKey, value: dict) -> None:
        name = key.filename
        with self._lock:
            self._memory[name] = value
            if self.root is None:
                return
            path = self.root / name
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(value, ensure_ascii=False, sort_keys=True), encoding="utf-8")
            os.replace(tmp, path)
