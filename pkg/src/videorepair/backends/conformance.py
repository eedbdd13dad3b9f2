"""Protocol conformance probes shared by the scripted mocks and any real adapter.

The suite is server-implementation agnostic: given a role -> base URL
map it checks, for every bound role, that

* GET /healthz answers 200 with a valid health document,
* a well-formed probe request per endpoint answers 200 with a
  schema-valid reply, and
* a schema-violating request is rejected with HTTP 422.

Raw ``httpx`` calls are used on purpose so that malformed probes reach
the server instead of being stopped by the client's own validation.
"""

from __future__ import annotations

from dataclasses import dataclass

import httpx
import numpy as np

from .roles import BackendRole, PATHS_BY_ROLE
from .wire import tensor_payload
from . import schemas

PROBE_PROMPT = "a red ball on a table"

_PROBE_IMAGE = np.zeros((16, 16, 3), dtype=np.uint8)
_PROBE_VIDEO = np.zeros((4, 16, 16, 3), dtype=np.uint8)
_PROBE_NOISE = np.zeros((4, 4, 2, 2), dtype=np.float32)
_PROBE_WEIGHTS = np.ones((4, 2, 2), dtype=np.float32)

_PROBE_QUESTION = {
    "id": "q1",
    "text": "Is there one ball?",
    "kind": "count",
    "object": "ball",
    "target_count": 1,
    "depends_on": [],
}


def probe_requests() -> dict[str, tuple[str, dict, str]]:
    """path -> (role, valid request, response schema name)."""
    image = tensor_payload(_PROBE_IMAGE)
    return {
        "/v1/plan": ("llm_planner", {"prompt": PROBE_PROMPT}, "plan_response"),
        "/v1/refineprompt": (
            "llm_planner",
            {
                "mode": "refine",
                "original_prompt": PROBE_PROMPT,
                "questions": [_PROBE_QUESTION],
            },
            "refineprompt_response",
        ),
        "/v1/vqa": (
            "vqa",
            {
                "task": "count",
                "question": "Is there one ball?",
                "object": "ball",
                "n_p": 1,
                "image": image,
            },
            "vqa_count_response",
        ),
        "/v1/point": (
            "pointer",
            {"image": image, "prompt": "Point the biggest 1 ball"},
            "point_response",
        ),
        "/v1/segment": (
            "segmenter",
            {"image": image, "point": {"x": 0.5, "y": 0.5}},
            "segment_response",
        ),
        "/v1/generate": (
            "t2v",
            {
                "prompt_regions": [
                    {"weights": tensor_payload(_PROBE_WEIGHTS), "prompt": PROBE_PROMPT}
                ],
                "noise": tensor_payload(_PROBE_NOISE),
                "dims": {"frames": 4, "height": 16, "width": 16},
                "seed": 7,
                "d": 8,
            },
            "generate_response",
        ),
        "/v1/score": (
            "scorer",
            {"prompt": PROBE_PROMPT, "video": tensor_payload(_PROBE_VIDEO)},
            "score_response",
        ),
    }


def malformed_requests() -> dict[str, dict]:
    """path -> request violating the endpoint's schema (must yield 422)."""
    return {
        "/v1/plan": {"prompt": 7},
        "/v1/refineprompt": {"mode": "refine"},
        "/v1/vqa": {"task": "count", "question": "Is there one ball?"},
        "/v1/point": {"prompt": "Point the biggest 1 ball"},
        "/v1/segment": {"image": tensor_payload(_PROBE_IMAGE)},
        "/v1/generate": {"seed": 7},
        "/v1/score": {"prompt": ""},
    }


@dataclass
class CheckResult:
    role: str
    name: str
    passed: bool
    detail: str = ""


def run_conformance(endpoints: dict[str, str], timeout: float = 15.0) -> list[CheckResult]:
    results: list[CheckResult] = []
    probes = probe_requests()
    bad = malformed_requests()

    with httpx.Client(timeout=timeout) as http:
        for role_name, base in sorted(endpoints.items()):
            role = BackendRole(role_name)
            base = base.rstrip("/")

            results.append(_check_health(http, role_name, base))
            for path in PATHS_BY_ROLE[role]:
                probe_role, request, response_schema = probes[path]
                assert probe_role == role_name
                results.append(
                    _check_valid_roundtrip(http, role_name, base, path, request, response_schema)
                )
                results.append(_check_rejection(http, role_name, base, path, bad[path]))
    return results


def _check_health(http, role_name, base) -> CheckResult:
    name = "healthz"
    try:
        response = http.get(base + "/healthz")
    except httpx.HTTPError as exc:
        return CheckResult(role_name, name, False, f"transport: {exc}")
    if response.status_code != 200:
        return CheckResult(role_name, name, False, f"status {response.status_code}")
    if not schemas.is_valid("health_response", response.json()):
        return CheckResult(role_name, name, False, "health document invalid")
    return CheckResult(role_name, name, True)


def _check_valid_roundtrip(http, role_name, base, path, request, response_schema) -> CheckResult:
    name = f"{path} accepts valid request"
    try:
        response = http.post(base + path, json=request)
    except httpx.HTTPError as exc:
        return CheckResult(role_name, name, False, f"transport: {exc}")
    if response.status_code != 200:
        return CheckResult(
            role_name, name, False, f"status {response.status_code}: {response.text[:200]}"
        )
    try:
        doc = response.json()
    except ValueError:
        return CheckResult(role_name, name, False, "non-JSON reply")
    if not schemas.is_valid(response_schema, doc):
        return CheckResult(role_name, name, False, f"reply violates {response_schema}")
    return CheckResult(role_name, name, True)


def _check_rejection(http, role_name, base, path, request) -> CheckResult:
    name = f"{path} rejects malformed request"
    try:
        response = http.post(base + path, json=request)
    except httpx.HTTPError as exc:
        return CheckResult(role_name, name, False, f"transport: {exc}")
    if response.status_code != 422:
        return CheckResult(role_name, name, False, f"expected 422, got {response.status_code}")
    return CheckResult(role_name, name, True)


def conformance_scenarios() -> dict[str, dict]:
    """Scenario bundle that lets the scripted mocks answer every probe."""
    image_mask = np.zeros((16, 16), dtype=np.uint8)
    image_mask[4:12, 4:12] = 1
    return {
        "llm_planner": {
            "role": "llm_planner",
            "rules": [
                {
                    "path": "/v1/plan",
                    "request": {"prompt": PROBE_PROMPT},
                    "response": {
                        "tuples": [{"id": "t1", "kind": "entity", "subject": "ball"}],
                        "questions": [_PROBE_QUESTION],
                    },
                },
                {
                    "path": "/v1/refineprompt",
                    "request": {
                        "mode": "refine",
                        "original_prompt": PROBE_PROMPT,
                        "questions": [_PROBE_QUESTION],
                    },
                    "response": {"refinement_prompt": "one red ball"},
                },
            ],
        },
        "vqa": {
            "role": "vqa",
            "rules": [
                {
                    "path": "/v1/vqa",
                    "request": {
                        "task": "count",
                        "question": "Is there one ball?",
                        "object": "ball",
                        "n_p": 1,
                    },
                    "response": {"answer": "yes", "n_v": 1, "reasoning": "one ball"},
                }
            ],
        },
        "pointer": {
            "role": "pointer",
            "rules": [
                {
                    "path": "/v1/point",
                    "request": {"prompt": "Point the biggest 1 ball"},
                    "response": {"points": [{"x": 0.5, "y": 0.5}]},
                }
            ],
        },
        "segmenter": {
            "role": "segmenter",
            "rules": [
                {
                    "path": "/v1/segment",
                    "request": {"point": {"x": 0.5, "y": 0.5}},
                    "response": {"mask": tensor_payload(image_mask)},
                }
            ],
        },
        "t2v": {"role": "t2v", "behavior": "t2v_preserve", "rules": []},
        "scorer": {
            "role": "scorer",
            "rules": [
                {
                    "path": "/v1/score",
                    "request": {"prompt": PROBE_PROMPT},
                    "response": {"score": 0.5},
                }
            ],
        },
    }
