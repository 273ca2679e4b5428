"""Launch the server with built-in tiny models on an ephemeral port."""

from __future__ import annotations

import socket
import threading
import time

import pytest
import requests
import uvicorn
from PIL import Image

from modelserve.server import ExpertBinding, ServeConfig, create_app


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


class LiveServer:
    def __init__(self, config: ServeConfig, port: int):
        self.port = port
        self.base_url = f"http://127.0.0.1:{port}"
        uv_config = uvicorn.Config(
            create_app(config), host="127.0.0.1", port=port, log_level="warning"
        )
        self.server = uvicorn.Server(uv_config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def start(self) -> "LiveServer":
        self.thread.start()
        deadline = time.monotonic() + 60
        while time.monotonic() < deadline:
            try:
                resp = requests.post(self.base_url + "/v1/health", json={}, timeout=2)
                if resp.status_code == 200:
                    return self
            except requests.RequestException:
                pass
            time.sleep(0.2)
        raise RuntimeError("server did not come up")

    def stop(self) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)

    def persona_url(self, name: str) -> str:
        return f"{self.base_url}/{name}"


@pytest.fixture(scope="session")
def tiny_server():
    config = ServeConfig(
        experts={
            "OFA": ExpertBinding("tiny-vision:1", "tiny-vision:1"),
            "BLIP": ExpertBinding("tiny-vision:2", "tiny-vision:2"),
        },
        coordinator_model="tiny-seq2seq:3",
        embedder_model="tiny-encoder:4",
    )
    server = LiveServer(config, free_port()).start()
    yield server
    server.stop()


@pytest.fixture(scope="session")
def sample_image(tmp_path_factory) -> str:
    path = tmp_path_factory.mktemp("images") / "sample.png"
    Image.new("RGB", (96, 72), (40, 120, 200)).save(path)
    return str(path)
