"""Shared fixtures: mock servers over the checked-in corpora, handle helpers."""

from __future__ import annotations

from pathlib import Path

import pytest

from vlmcoord.backends import BackendHandle, serve_mock
from vlmcoord.core import TaskFamily
from vlmcoord.datasets import DatasetManifest
from vlmcoord.evalharness import FALLBACK_EMBEDDER_URL, Mode, RunConfig

TESTS_DIR = Path(__file__).resolve().parent
FIXTURES = TESTS_DIR / "fixtures"
GOLDEN_DIR = TESTS_DIR.parent / "fixtures" / "golden"


@pytest.fixture(scope="session")
def vqa50_server():
    server = serve_mock(FIXTURES / "vqa50" / "mock")
    yield server
    server.stop()


@pytest.fixture(scope="session")
def entail50_server():
    server = serve_mock(FIXTURES / "entail50" / "mock")
    yield server
    server.stop()


def expert_handle(server, name: str, **kwargs) -> BackendHandle:
    return BackendHandle(name=name, base_url=server.persona_url(name), role="expert", **kwargs)


def coordinator_handle(server, persona: str, name: str = "coord") -> BackendHandle:
    return BackendHandle(name=name, base_url=server.persona_url(persona), role="coordinator")


def fallback_embedder_handle() -> BackendHandle:
    return BackendHandle(name="fallback", base_url=FALLBACK_EMBEDDER_URL, role="embedder")


def make_config(
    server,
    corpus: str,
    cache_dir: Path,
    mode: Mode,
    coordinator_persona: str | None = None,
    panel: tuple[str, ...] = ("OFA", "BLIP"),
    **overrides,
) -> RunConfig:
    family = TaskFamily.VQA_MC if corpus == "vqa50" else TaskFamily.ENTAILMENT
    manifest = DatasetManifest(
        name="custom",
        family=family,
        paths={"train": str(FIXTURES / corpus / "train.jsonl"),
               "val": str(FIXTURES / corpus / "val.jsonl")},
    )
    coordinator = (
        coordinator_handle(server, coordinator_persona) if coordinator_persona else None
    )
    return RunConfig(
        dataset=manifest,
        panel=tuple(expert_handle(server, n) for n in panel),
        coordinator=coordinator,
        embedder=fallback_embedder_handle(),
        mode=mode,
        cache_dir=str(cache_dir),
        **overrides,
    )
