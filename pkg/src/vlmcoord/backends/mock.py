"""Deterministic fixture-backed mock server for the wire protocol.

One server can host several personas (experts, a coordinator, an embedder)
on a single port: a fixture directory with subdirectories mounts each
subdirectory at /<name>/v1/*, so a handle's base_url carries the persona
prefix and the protocol relative to base_url is unchanged. A flat fixture
directory serves a single persona at the root.

Coordinator personas answer from completions.jsonl or from a mode flag:
  echo-expert:<name>  completion echoes <name>'s answer line in the prompt
  oracle              completion equals the gold answer of the instance whose
                      (transformed) question appears in the prompt; requires a
                      canonical dataset sidecar
  fixed:<text>        every completion is <text>
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from ..core import InstanceRecord, gold_answer_text
from ..errors import UsageError
from .fallback import FALLBACK_DIM, fallback_embed

_FIXTURE_FILES = ("captions.jsonl", "answers.jsonl", "completions.jsonl", "mock.json")


@dataclass
class _Persona:
    name: str
    roles: list[str] = field(default_factory=list)
    captions: dict[str, str] = field(default_factory=dict)
    answers: dict[tuple[str, str], str] = field(default_factory=dict)
    completions: dict[str, str] = field(default_factory=dict)
    mode: str | None = None
    sidecar: list[InstanceRecord] = field(default_factory=list)


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append(json.loads(line))
        except ValueError as exc:
            raise UsageError(f"malformed fixture {path}:{lineno}: {exc}") from exc
    return rows


def _load_persona(name: str, directory: Path) -> _Persona:
    persona = _Persona(name=name)
    captions = directory / "captions.jsonl"
    if captions.exists():
        for row in _read_jsonl(captions):
            if "image" not in row or "caption" not in row:
                raise UsageError(f"malformed fixture {captions}: rows need 'image' and 'caption'")
            persona.captions[row["image"]] = row["caption"]
    answers = directory / "answers.jsonl"
    if answers.exists():
        for row in _read_jsonl(answers):
            if "image" not in row or "question" not in row or "answer" not in row:
                raise UsageError(f"malformed fixture {answers}: rows need 'image', 'question', 'answer'")
            persona.answers[(row["image"], row["question"])] = row["answer"]
    completions = directory / "completions.jsonl"
    if completions.exists():
        for row in _read_jsonl(completions):
            if "prompt" not in row or "completion" not in row:
                raise UsageError(f"malformed fixture {completions}: rows need 'prompt' and 'completion'")
            persona.completions[row["prompt"]] = row["completion"]
    config = directory / "mock.json"
    explicit_roles: list[str] = []
    if config.exists():
        try:
            conf = json.loads(config.read_text(encoding="utf-8"))
        except ValueError as exc:
            raise UsageError(f"malformed fixture {config}: {exc}") from exc
        persona.mode = conf.get("mode")
        explicit_roles = conf.get("roles", [])
        sidecar = conf.get("sidecar")
        if sidecar:
            from ..datasets import load_canonical_jsonl

            persona.sidecar = load_canonical_jsonl(directory / sidecar)
        if persona.mode and not (
            persona.mode in ("oracle",)
            or persona.mode.startswith("echo-expert:")
            or persona.mode.startswith("fixed:")
        ):
            raise UsageError(f"unknown mock mode {persona.mode!r} in {config}")
        if persona.mode == "oracle" and not persona.sidecar:
            raise UsageError(f"oracle mode in {config} requires a dataset sidecar")
    roles = set(explicit_roles)
    if persona.captions or persona.answers:
        roles.add("expert")
    if persona.completions or persona.mode:
        roles.add("coordinator")
    persona.roles = sorted(roles)
    if not persona.roles:
        raise UsageError(f"fixture persona {name or directory} declares no role")
    return persona


def _load_personas(fixture_dir: Path) -> dict[str, _Persona]:
    fixture_dir = Path(fixture_dir)
    if not fixture_dir.is_dir():
        raise UsageError(f"fixture dir {fixture_dir} does not exist")
    if any((fixture_dir / f).exists() for f in _FIXTURE_FILES):
        return {"": _load_persona("", fixture_dir)}
    personas = {}
    for sub in sorted(p for p in fixture_dir.iterdir() if p.is_dir()):
        personas[sub.name] = _load_persona(sub.name, sub)
    if not personas:
        raise UsageError(f"fixture dir {fixture_dir} holds no fixtures")
    return personas


def _oracle_completion(persona: _Persona, prompt: str) -> str | None:
    from ..promptkit import transform_question

    q_lines = [line for line in prompt.splitlines() if line.startswith("Q:")]
    if not q_lines:
        return None
    content = q_lines[-1][2:]
    for record in persona.sidecar:
        query = transform_question(record.family, record.question)
        rendered = query if query.startswith(" ") else " " + query
        if rendered == content:
            return gold_answer_text(record)
    return None


def _echo_completion(expert: str, prompt: str) -> str | None:
    prefix = f"{expert}'s answer: "
    matches = [line for line in prompt.splitlines() if line.startswith(prefix)]
    if not matches:
        return None
    return matches[-1][len(prefix):]


class _Handler(BaseHTTPRequestHandler):
    server: "MockHTTPServer"

    def log_message(self, fmt, *args):  # quiet; the request log serves tests
        pass

    def _reply(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _error(self, status: int, code: str, message: str) -> None:
        self._reply(status, {"error": {"code": code, "message": message}})

    def do_GET(self) -> None:
        self._error(405, "method_not_allowed", "protocol is POST-only")

    def do_POST(self) -> None:
        mock = self.server.mock
        try:
            length = int(self.headers.get("Content-Length", "0"))
            raw = self.rfile.read(length) if length else b"{}"
            body = json.loads(raw.decode("utf-8")) if raw.strip() else {}
        except (ValueError, UnicodeDecodeError):
            self._error(400, "bad_request", "body must be UTF-8 JSON")
            return

        persona_name, op = mock.route(self.path)
        mock.log_request(persona_name, self.path, body)
        if op == "health" and persona_name is None:
            roles = sorted({r for p in mock.personas.values() for r in p.roles})
            self._reply(200, {"ok": True, "roles": roles})
            return
        if persona_name is None or persona_name not in mock.personas:
            self._error(404, "unknown_endpoint", f"no persona serves {self.path}")
            return
        persona = mock.personas[persona_name]

        if op == "health":
            self._reply(200, {"ok": True, "roles": persona.roles})
        elif op == "caption":
            image = (body.get("image") or {}).get("value")
            if image is None:
                self._error(400, "bad_request", "missing image.value")
            elif image in persona.captions:
                self._reply(200, {"caption": persona.captions[image]})
            else:
                self._error(404, "unknown_image", "unknown image")
        elif op == "answer":
            image = (body.get("image") or {}).get("value")
            question = body.get("question")
            if image is None or question is None:
                self._error(400, "bad_request", "missing image.value or question")
            elif (image, question) in persona.answers:
                self._reply(200, {"answer": persona.answers[(image, question)]})
            else:
                self._error(404, "unknown_question", "no fixture for this image/question")
        elif op == "complete":
            prompt = body.get("prompt")
            if not isinstance(prompt, str) or not prompt:
                self._error(400, "empty_prompt", "prompt must be a non-empty string")
                return
            completion = self._completion_for(persona, prompt)
            if completion is None:
                self._error(404, "unknown_prompt", "no fixture or mode covers this prompt")
            else:
                self._reply(200, {"completion": completion})
        elif op == "embed":
            texts = body.get("texts")
            if not isinstance(texts, list) or not texts:
                self._error(400, "bad_request", "texts must be a non-empty list")
                return
            vectors = [list(fallback_embed(t).values) for t in texts]
            self._reply(200, {"vectors": vectors, "dim": FALLBACK_DIM})
        else:
            self._error(404, "unknown_endpoint", f"no such operation {self.path}")

    def _completion_for(self, persona: _Persona, prompt: str) -> str | None:
        if prompt in persona.completions:
            return persona.completions[prompt]
        mode = persona.mode
        if mode is None:
            return None
        if mode == "oracle":
            return _oracle_completion(persona, prompt)
        if mode.startswith("echo-expert:"):
            return _echo_completion(mode.split(":", 1)[1], prompt)
        if mode.startswith("fixed:"):
            return mode.split(":", 1)[1]
        return None


class MockHTTPServer(ThreadingHTTPServer):
    daemon_threads = True
    mock: "MockServer"


class MockServer:
    """Fixture-backed server; start() runs it on a background thread."""

    def __init__(self, fixture_dir: Path | str, port: int = 0) -> None:
        self.personas = _load_personas(Path(fixture_dir))
        self.multi = set(self.personas) != {""}
        self.httpd = MockHTTPServer(("127.0.0.1", port), _Handler)
        self.httpd.mock = self
        self.request_log: list[dict] = []
        self._log_lock = threading.Lock()
        self._thread: threading.Thread | None = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    @property
    def base_url(self) -> str:
        return f"http://127.0.0.1:{self.port}"

    def persona_url(self, name: str) -> str:
        return f"{self.base_url}/{name}" if self.multi else self.base_url

    def route(self, path: str) -> tuple[str | None, str | None]:
        """Map a request path to (persona name, operation)."""
        parts = [p for p in path.split("/") if p]
        if len(parts) >= 2 and parts[-2] == "v1":
            op = parts[-1]
            prefix = parts[:-2]
            if not prefix:
                if not self.multi:
                    return "", op
                return (None, "health") if op == "health" else (None, op)
            if len(prefix) == 1 and self.multi:
                return prefix[0], op
        return None, None

    def log_request(self, persona: str | None, path: str, body: dict) -> None:
        with self._log_lock:
            self.request_log.append({"persona": persona, "path": path, "body": body})
        logging.getLogger("vlmcoord.mock").debug("%s %s", path, body)

    def requests_for(self, persona: str, op: str | None = None) -> list[dict]:
        with self._log_lock:
            return [
                r
                for r in self.request_log
                if r["persona"] == persona and (op is None or r["path"].endswith(f"/v1/{op}"))
            ]

    def start(self) -> "MockServer":
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)


def serve_mock(fixture_dir: Path | str, port: int = 0) -> MockServer:
    """Load fixtures, bind the port, and start serving on a background thread."""
    return MockServer(fixture_dir, port).start()
