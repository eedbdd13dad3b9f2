"""Backend role registry and per-role endpoint paths."""

from __future__ import annotations

from enum import Enum


class BackendRole(str, Enum):
    LLM_PLANNER = "llm_planner"
    VQA = "vqa"
    POINTER = "pointer"
    SEGMENTER = "segmenter"
    T2V = "t2v"
    SCORER = "scorer"


# Roles a pipeline run cannot do without; the scorer merely breaks ties.
REQUIRED_ROLES = (
    BackendRole.LLM_PLANNER,
    BackendRole.VQA,
    BackendRole.POINTER,
    BackendRole.SEGMENTER,
    BackendRole.T2V,
)

PATHS_BY_ROLE: dict[BackendRole, tuple[str, ...]] = {
    BackendRole.LLM_PLANNER: ("/v1/plan", "/v1/refineprompt"),
    BackendRole.VQA: ("/v1/vqa",),
    BackendRole.POINTER: ("/v1/point",),
    BackendRole.SEGMENTER: ("/v1/segment",),
    BackendRole.T2V: ("/v1/generate",),
    BackendRole.SCORER: ("/v1/score",),
}

REQUEST_SCHEMA_BY_PATH = {
    "/v1/plan": "plan_request",
    "/v1/refineprompt": "refineprompt_request",
    "/v1/vqa": "vqa_request",
    "/v1/point": "point_request",
    "/v1/segment": "segment_request",
    "/v1/generate": "generate_request",
    "/v1/score": "score_request",
}

RESPONSE_SCHEMA_BY_PATH = {
    "/v1/plan": "plan_response",
    "/v1/refineprompt": "refineprompt_response",
    "/v1/vqa": "vqa_response",
    "/v1/point": "point_response",
    "/v1/segment": "segment_response",
    "/v1/generate": "generate_response",
    "/v1/score": "score_response",
}
