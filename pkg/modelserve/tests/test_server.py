"""Protocol conformance and endpoint behavior of the live tiny-model server."""

import requests

from vlmcoord.conformance import check_server


def test_conformance_expert_personas(tiny_server, sample_image):
    for name in ("OFA", "BLIP"):
        failures = check_server(
            tiny_server.persona_url(name),
            ["expert"],
            image={"kind": "path", "value": sample_image},
        )
        assert failures == [], failures


def test_conformance_coordinator(tiny_server):
    failures = check_server(tiny_server.persona_url("coordinator"), ["coordinator"])
    assert failures == [], failures


def test_conformance_embedder(tiny_server):
    failures = check_server(tiny_server.persona_url("embedder"), ["embedder"])
    assert failures == [], failures


def test_root_health_aggregates(tiny_server):
    data = requests.post(tiny_server.base_url + "/v1/health", json={}, timeout=10).json()
    assert data == {"ok": True, "roles": ["coordinator", "embedder", "expert"]}


def test_greedy_completion_deterministic(tiny_server):
    body = {"prompt": "Q: what is this?\n\nA:", "max_new_tokens": 12, "greedy": True}
    url = tiny_server.persona_url("coordinator") + "/v1/complete"
    first = requests.post(url, json=body, timeout=30).json()
    second = requests.post(url, json=body, timeout=30).json()
    assert first == second
    assert isinstance(first["completion"], str) and first["completion"]


def test_embed_dim_matches_model_width(tiny_server):
    url = tiny_server.persona_url("embedder") + "/v1/embed"
    data = requests.post(url, json={"texts": ["green grass"]}, timeout=30).json()
    assert data["dim"] == 64
    assert len(data["vectors"]) == 1 and len(data["vectors"][0]) == 64


def test_missing_image_error_envelope(tiny_server):
    url = tiny_server.persona_url("OFA") + "/v1/caption"
    resp = requests.post(url, json={"image": {"kind": "path", "value": "/nope.png"}}, timeout=10)
    assert resp.status_code == 400
    assert resp.json()["error"]["code"] == "bad_request"


def test_experts_with_different_seeds_disagree(tiny_server, sample_image):
    captions = {}
    for name in ("OFA", "BLIP"):
        url = tiny_server.persona_url(name) + "/v1/caption"
        body = {"image": {"kind": "path", "value": sample_image}}
        captions[name] = requests.post(url, json=body, timeout=30).json()["caption"]
    assert captions["OFA"] != captions["BLIP"]
