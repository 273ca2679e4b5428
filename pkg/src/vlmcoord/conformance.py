"""Wire-protocol conformance checks, shared by the mock and any live server.

Every check speaks plain HTTP against a base_url, so the same suite runs
unchanged against the fixture mock and a real model server.
"""

from __future__ import annotations

import requests

CONFORMANCE_TIMEOUT = 60.0


def _post(base_url: str, path: str, body: dict) -> requests.Response:
    return requests.post(base_url.rstrip("/") + path, json=body, timeout=CONFORMANCE_TIMEOUT)


def check_server(
    base_url: str,
    roles: list[str],
    image: dict | None = None,
    question: str = "what is shown?",
    prompt: str | None = None,
) -> list[str]:
    """Run every applicable check; returns a list of failures (empty = pass).

    `image` is a wire-format reference ({"kind", "value"}) the server can
    resolve; required for the expert checks. `prompt` lets the caller supply
    a completion prompt the server is guaranteed to answer (fixture-backed
    coordinators only cover certain prompts).
    """
    failures: list[str] = []

    def expect(condition: bool, message: str) -> bool:
        if not condition:
            failures.append(message)
        return condition

    resp = _post(base_url, "/v1/health", {})
    if expect(resp.status_code == 200, f"health returned {resp.status_code}"):
        data = resp.json()
        expect(data.get("ok") is True, "health body lacks ok=true")
        served = data.get("roles", [])
        for role in roles:
            expect(role in served, f"role {role!r} not in health roles {served}")

    if "expert" in roles and image is not None:
        resp = _post(base_url, "/v1/caption", {"image": image})
        if expect(resp.status_code == 200, f"caption returned {resp.status_code}"):
            expect(isinstance(resp.json().get("caption"), str), "caption body lacks 'caption' string")
        resp = _post(base_url, "/v1/caption", {})
        expect(resp.status_code >= 400, "caption without image must fail")
        expect("error" in resp.json(), "caption error lacks the error envelope")

        resp = _post(base_url, "/v1/answer", {"image": image, "question": question})
        if expect(resp.status_code == 200, f"answer returned {resp.status_code}"):
            expect(isinstance(resp.json().get("answer"), str), "answer body lacks 'answer' string")

    if "coordinator" in roles:
        body = {"prompt": prompt or f"Q: {question}\n\nA:", "max_new_tokens": 8, "greedy": True}
        first = _post(base_url, "/v1/complete", body)
        if expect(first.status_code == 200, f"complete returned {first.status_code}"):
            expect(isinstance(first.json().get("completion"), str), "complete body lacks 'completion'")
            second = _post(base_url, "/v1/complete", body)
            expect(
                second.status_code == 200 and second.json() == first.json(),
                "greedy completion is not deterministic across identical requests",
            )
        resp = _post(base_url, "/v1/complete", {"prompt": "", "max_new_tokens": 8, "greedy": True})
        expect(resp.status_code >= 400, "empty prompt must fail")
        expect("error" in resp.json(), "empty-prompt error lacks the error envelope")

    if "embedder" in roles:
        resp = _post(base_url, "/v1/embed", {"texts": ["a", "b"]})
        if expect(resp.status_code == 200, f"embed returned {resp.status_code}"):
            data = resp.json()
            vectors, dim = data.get("vectors"), data.get("dim")
            if expect(
                isinstance(vectors, list) and len(vectors) == 2 and isinstance(dim, int),
                "embed body lacks vectors/dim",
            ):
                expect(all(len(v) == dim for v in vectors), "vector lengths disagree with dim")
                flipped = _post(base_url, "/v1/embed", {"texts": ["b", "a"]}).json()
                expect(
                    flipped.get("vectors") == [vectors[1], vectors[0]],
                    "embed is not order-preserving/stateless",
                )
        resp = _post(base_url, "/v1/embed", {"texts": []})
        expect(resp.status_code >= 400, "empty text list must fail")

    return failures
