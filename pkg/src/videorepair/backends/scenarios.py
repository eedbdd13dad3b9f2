"""Built-in scripted scenario: the two-cooks-and-a-bear demo scene.

The scene drives the golden end-to-end tests and the CLI mock demo. As
scripted, the initial video shows only one of the two requested people,
so evaluation scores 1/2, the bear is preserved, and every refined
candidate fixes the count. Answer sequences express "first evaluation
sees the flaw, later evaluations see it fixed".
"""

from __future__ import annotations

import numpy as np

from .wire import tensor_payload

DEMO_PROMPT = "two people are making pizza while a bear is watching them"

DEMO_TUPLES = [
    {"id": "t1", "kind": "entity", "subject": "people"},
    {"id": "t2", "kind": "entity", "subject": "pizza"},
    {"id": "t3", "kind": "entity", "subject": "bear"},
    {
        "id": "t4",
        "kind": "relationship",
        "subject": "people",
        "attribute_or_relation": "making",
        "object2": "pizza",
    },
]

DEMO_QUESTIONS = [
    {
        "id": "q1",
        "text": "Are there two people?",
        "kind": "count",
        "object": "people",
        "target_count": 2,
        "depends_on": [],
    },
    {
        "id": "q2",
        "text": "Is there one pizza?",
        "kind": "count",
        "object": "pizza",
        "target_count": 1,
        "depends_on": [],
    },
    {
        "id": "q3",
        "text": "Is there one bear?",
        "kind": "count",
        "object": "bear",
        "target_count": 1,
        "depends_on": [],
    },
    {
        "id": "q4",
        "text": "Are the people making pizza?",
        "kind": "attribute",
        "object": "people",
        "depends_on": ["q1"],
    },
]

DEMO_REFINEMENT_PROMPT = "two people making one pizza"

DEFAULT_CANDIDATE_SCORES = (0.31, 0.44, 0.12, 0.98, 0.55)


def demo_segment_mask(height: int, width: int) -> np.ndarray:
    """The scripted segmenter output: a quarter-size square block.

    The block is aligned to the center-left quarter of the frame
    ([H/4, H/2) x [W/4, W/2)), which keeps it block-aligned for any
    downsample factor dividing H/4 and W/4.
    """
    mask = np.zeros((height, width), dtype=np.uint8)
    mask[height // 4 : height // 2, width // 4 : width // 2] = 1
    return mask


def demo_scene_scenarios(
    height: int = 64,
    width: int = 64,
    k: int = 5,
    candidate_scores: tuple[float, ...] | None = None,
    misaligned_entry: bool = True,
) -> dict[str, dict]:
    """Scenario bundle (role -> scenario doc) for the demo scene.

    With ``misaligned_entry`` the first evaluation reports one person
    instead of two; subsequent evaluations (of refined candidates) see
    the corrected scene. Without it, every answer is correct from the
    start, which makes a round stop early.
    """
    scores = candidate_scores or DEFAULT_CANDIDATE_SCORES
    if len(scores) < k:
        scores = tuple(scores) + tuple(0.1 for _ in range(k - len(scores)))

    people_count_responses = [{"answer": "yes", "n_v": 2, "reasoning": "both cooks visible"}]
    if misaligned_entry:
        people_count_responses.insert(
            0, {"answer": "no", "n_v": 1, "reasoning": "only one cook visible"}
        )

    llm_planner = {
        "role": "llm_planner",
        "rules": [
            {
                "path": "/v1/plan",
                "request": {"prompt": DEMO_PROMPT},
                "response": {"tuples": DEMO_TUPLES, "questions": DEMO_QUESTIONS},
            },
            {
                "path": "/v1/refineprompt",
                "request": {
                    "mode": "refine",
                    "original_prompt": DEMO_PROMPT,
                    "questions": [DEMO_QUESTIONS[0], DEMO_QUESTIONS[1], DEMO_QUESTIONS[3]],
                },
                "response": {"refinement_prompt": DEMO_REFINEMENT_PROMPT},
            },
        ],
    }

    vqa = {
        "role": "vqa",
        "rules": [
            {
                "path": "/v1/vqa",
                "request": {
                    "task": "count",
                    "question": "Are there two people?",
                    "object": "people",
                    "n_p": 2,
                },
                "responses": people_count_responses,
            },
            {
                "path": "/v1/vqa",
                "request": {
                    "task": "count",
                    "question": "Is there one pizza?",
                    "object": "pizza",
                    "n_p": 1,
                },
                "response": {"answer": "yes", "n_v": 1, "reasoning": "one pizza on the table"},
            },
            {
                "path": "/v1/vqa",
                "request": {
                    "task": "count",
                    "question": "Is there one bear?",
                    "object": "bear",
                    "n_p": 1,
                },
                "response": {"answer": "yes", "n_v": 1, "reasoning": "one bear watching"},
            },
            {
                "path": "/v1/vqa",
                "request": {
                    "task": "attribute",
                    "question": "Are the people making pizza?",
                    "object": "people",
                },
                "response": {"answer": "yes", "reasoning": "hands kneading dough"},
            },
            {
                "path": "/v1/vqa",
                "request": {
                    "task": "select_objects",
                    "objects": ["bear", "people", "pizza"],
                    "allow_multi": False,
                },
                "response": {"objects": ["bear"], "reasoning": "the bear scored fully correct"},
            },
            {
                "path": "/v1/vqa",
                "request": {
                    "task": "select_objects",
                    "objects": ["bear", "people", "pizza"],
                    "allow_multi": True,
                },
                "response": {
                    "objects": ["bear", "pizza"],
                    "reasoning": "bear and pizza scored fully correct",
                },
            },
        ],
    }

    pointer = {
        "role": "pointer",
        "rules": [
            {
                "path": "/v1/point",
                "request": {"prompt": "Point the biggest 1 bear"},
                "response": {"points": [{"x": 0.61, "y": 0.42}]},
            },
            {
                "path": "/v1/point",
                "request": {"prompt": "Point the biggest 1 pizza"},
                "response": {"points": [{"x": 0.2, "y": 0.8}]},
            },
        ],
    }

    segment_response = {"mask": tensor_payload(demo_segment_mask(height, width))}
    segmenter = {
        "role": "segmenter",
        "rules": [
            {
                "path": "/v1/segment",
                "request": {"point": {"x": 0.61, "y": 0.42}},
                "response": segment_response,
            },
            {
                "path": "/v1/segment",
                "request": {"point": {"x": 0.2, "y": 0.8}},
                "response": segment_response,
            },
        ],
    }

    t2v = {"role": "t2v", "behavior": "t2v_preserve", "rules": []}

    scorer = {
        "role": "scorer",
        "rules": [
            {
                "path": "/v1/score",
                "request": {"prompt": DEMO_PROMPT},
                "responses": [{"score": float(s)} for s in scores[:k]],
            }
        ],
    }

    return {
        "llm_planner": llm_planner,
        "vqa": vqa,
        "pointer": pointer,
        "segmenter": segmenter,
        "t2v": t2v,
        "scorer": scorer,
    }
