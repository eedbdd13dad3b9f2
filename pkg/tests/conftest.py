import numpy as np
import pytest

from videorepair.backends.mock import MockCluster
from videorepair.backends.scenarios import demo_scene_scenarios
from videorepair.tensors import VideoTensor


class StubHandle:
    """In-process stand-in for a RoleHandle; records every call."""

    def __init__(self, responder):
        self.responder = responder
        self.calls = []

    def call(self, path, payload, response_key=None):
        self.calls.append((path, payload))
        return self.responder(path, payload)

    def count(self, path=None):
        if path is None:
            return len(self.calls)
        return sum(1 for p, _ in self.calls if p == path)


@pytest.fixture
def stub_handle():
    return StubHandle


def make_video(frames=16, height=64, width=64, seed=0) -> VideoTensor:
    rng = np.random.default_rng(seed)
    return VideoTensor(rng.integers(0, 256, size=(frames, height, width, 3), dtype=np.uint8))


@pytest.fixture
def video16():
    return make_video()


@pytest.fixture
def demo_cluster():
    with MockCluster(demo_scene_scenarios(k=5)) as cluster:
        yield cluster


def two_round_scenarios(height=32, width=32):
    """Scripted four-object scene that improves over two rounds.

    Entry scores: round 1 -> 2/4, round 2 -> 3/4 (the round-1 winner),
    and the round-2 winner reaches 4/4. Answer sequences stay consistent:
    re-evaluating the same video yields the same answers.
    """
    seg_mask = np.zeros((height, width), dtype=np.uint8)
    seg_mask[height // 4 : height // 2, width // 4 : width // 2] = 1

    def count_q(qid, name):
        return {
            "id": qid,
            "text": f"Is there one {name}?",
            "kind": "count",
            "object": name,
            "target_count": 1,
            "depends_on": [],
        }

    questions = [count_q(f"q{i}", name) for i, name in enumerate(["cat", "dog", "bird", "fish"], 1)]
    tuples = [
        {"id": f"t{i}", "kind": "entity", "subject": name}
        for i, name in enumerate(["cat", "dog", "bird", "fish"], 1)
    ]

    yes = {"answer": "yes", "n_v": 1, "reasoning": "one"}
    no = {"answer": "no", "n_v": 2, "reasoning": "two"}

    from videorepair.backends.wire import tensor_payload

    return {
        "llm_planner": {
            "role": "llm_planner",
            "rules": [
                {
                    "path": "/v1/plan",
                    "request": {"prompt": "a cat, a dog, a bird and a fish"},
                    "response": {"tuples": tuples, "questions": questions},
                },
                {
                    "path": "/v1/refineprompt",
                    "request": {
                        "mode": "refine",
                        "original_prompt": "a cat, a dog, a bird and a fish",
                        "questions": questions[1:],
                    },
                    "response": {"refinement_prompt": "one dog, one bird and one fish"},
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
                        "question": "Is there one cat?",
                        "object": "cat",
                        "n_p": 1,
                    },
                    "response": yes,
                },
                {
                    "path": "/v1/vqa",
                    "request": {
                        "task": "count",
                        "question": "Is there one dog?",
                        "object": "dog",
                        "n_p": 1,
                    },
                    "responses": [no, yes],
                },
                {
                    "path": "/v1/vqa",
                    "request": {
                        "task": "count",
                        "question": "Is there one bird?",
                        "object": "bird",
                        "n_p": 1,
                    },
                    "response": yes,
                },
                {
                    "path": "/v1/vqa",
                    "request": {
                        "task": "count",
                        "question": "Is there one fish?",
                        "object": "fish",
                        "n_p": 1,
                    },
                    "responses": [no, no, no, yes],
                },
                {
                    "path": "/v1/vqa",
                    "request": {
                        "task": "select_objects",
                        "objects": ["bird", "cat", "dog", "fish"],
                        "allow_multi": False,
                    },
                    "response": {"objects": ["cat"]},
                },
            ],
        },
        "pointer": {
            "role": "pointer",
            "rules": [
                {
                    "path": "/v1/point",
                    "request": {"prompt": "Point the biggest 1 cat"},
                    "response": {"points": [{"x": 0.4, "y": 0.4}]},
                }
            ],
        },
        "segmenter": {
            "role": "segmenter",
            "rules": [
                {
                    "path": "/v1/segment",
                    "request": {"point": {"x": 0.4, "y": 0.4}},
                    "response": {"mask": tensor_payload(seg_mask)},
                }
            ],
        },
        "t2v": {"role": "t2v", "behavior": "t2v_preserve", "rules": []},
    }
