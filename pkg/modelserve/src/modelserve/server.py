"""FastAPI server exposing the coordination wire protocol over real models.

One process hosts every configured role on one port. Expert personas mount
under /<name>/v1/*, the coordinator under /coordinator/v1/*, the embedder
under /embedder/v1/*; a handle's base_url carries the persona prefix, so the
protocol relative to base_url matches the harness exactly. Root /v1/health
aggregates all roles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .models import EmbedModel, TextGenModel, VisionModel


@dataclass
class ExpertBinding:
    caption_model: str
    vqa_model: str


@dataclass
class ServeConfig:
    port: int = 8091
    device: str = "cpu"
    experts: dict[str, ExpertBinding] = field(default_factory=dict)
    coordinator_model: str | None = None
    embedder_model: str | None = None

    @classmethod
    def from_json_file(cls, path: str | Path) -> "ServeConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        experts = {
            name: ExpertBinding(
                caption_model=binding["caption_model"],
                vqa_model=binding.get("vqa_model", binding["caption_model"]),
            )
            for name, binding in raw.get("experts", {}).items()
        }
        return cls(
            port=raw.get("port", 8091),
            device=raw.get("device", "cpu"),
            experts=experts,
            coordinator_model=(raw.get("coordinator") or {}).get("model"),
            embedder_model=(raw.get("embedder") or {}).get("model"),
        )


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": {"code": code, "message": message}})


async def _body(request: Request) -> dict:
    try:
        payload = await request.json()
    except Exception:
        return {}
    return payload if isinstance(payload, dict) else {}


class _Expert:
    def __init__(self, binding: ExpertBinding, device: str):
        self.caption_model = VisionModel.load(binding.caption_model, device)
        if binding.vqa_model == binding.caption_model:
            self.vqa_model = self.caption_model
        else:
            self.vqa_model = VisionModel.load(binding.vqa_model, device)


def create_app(config: ServeConfig) -> FastAPI:
    app = FastAPI(title="modelserve")
    experts = {name: _Expert(binding, config.device) for name, binding in config.experts.items()}
    coordinator = (
        TextGenModel.load(config.coordinator_model, config.device)
        if config.coordinator_model
        else None
    )
    embedder = (
        EmbedModel.load(config.embedder_model, config.device) if config.embedder_model else None
    )

    all_roles = sorted(
        (["expert"] if experts else [])
        + (["coordinator"] if coordinator else [])
        + (["embedder"] if embedder else [])
    )

    def resolve_image(body: dict) -> str | None:
        image = body.get("image") or {}
        value = image.get("value")
        if not value:
            return None
        if image.get("kind") == "path" and not Path(value).exists():
            return None
        return value

    @app.post("/v1/health")
    async def health_root():
        return {"ok": True, "roles": all_roles}

    def register_expert(name: str, expert: _Expert) -> None:
        prefix = f"/{name}/v1"

        @app.post(f"{prefix}/health")
        async def health():
            return {"ok": True, "roles": ["expert"]}

        @app.post(f"{prefix}/caption")
        async def caption(request: Request):
            body = await _body(request)
            path = resolve_image(body)
            if path is None:
                return _error(400, "bad_request", "missing or unreadable image")
            try:
                return {"caption": expert.caption_model.caption(path)}
            except Exception as exc:
                return _error(500, "model_error", str(exc))

        @app.post(f"{prefix}/answer")
        async def answer(request: Request):
            body = await _body(request)
            path = resolve_image(body)
            question = body.get("question")
            if path is None or not isinstance(question, str):
                return _error(400, "bad_request", "missing image or question")
            try:
                return {"answer": expert.vqa_model.answer(path, question)}
            except Exception as exc:
                return _error(500, "model_error", str(exc))

    for name, expert in experts.items():
        register_expert(name, expert)

    if coordinator is not None:

        @app.post("/coordinator/v1/health")
        async def coordinator_health():
            return {"ok": True, "roles": ["coordinator"]}

        @app.post("/coordinator/v1/complete")
        async def complete(request: Request):
            body = await _body(request)
            prompt = body.get("prompt")
            if not isinstance(prompt, str) or not prompt:
                return _error(400, "empty_prompt", "prompt must be a non-empty string")
            max_new_tokens = int(body.get("max_new_tokens", 30))
            try:
                return {"completion": coordinator.complete(prompt, max_new_tokens)}
            except Exception as exc:
                return _error(500, "model_error", str(exc))

    if embedder is not None:

        @app.post("/embedder/v1/health")
        async def embedder_health():
            return {"ok": True, "roles": ["embedder"]}

        @app.post("/embedder/v1/embed")
        async def embed(request: Request):
            body = await _body(request)
            texts = body.get("texts")
            if not isinstance(texts, list) or not texts:
                return _error(400, "bad_request", "texts must be a non-empty list")
            try:
                return {"vectors": embedder.embed([str(t) for t in texts]), "dim": embedder.dim}
            except Exception as exc:
                return _error(500, "model_error", str(exc))

    return app


def serve(config: ServeConfig) -> None:
    import uvicorn

    uvicorn.run(create_app(config), host="0.0.0.0", port=config.port, log_level="info")
