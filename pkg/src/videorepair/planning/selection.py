"""Key-object selection and the preserve-count rule."""

from __future__ import annotations

import json
import logging

from ..backends.grid import frame_grid
from ..backends.wire import tensor_payload
from ..errors import BackendError, DomainError, ProtocolError
from ..prompts import PromptAssets, load_prompt_assets
from ..tensors import VideoTensor
from .models import EvaluationReport, QuestionSet

log = logging.getLogger(__name__)

# Scenery nouns never preserved through the deterministic fallback;
# the backend path handles this through its selection instruction.
BACKGROUND_DENYLIST = frozenset(
    {
        "background",
        "sky",
        "ground",
        "floor",
        "wall",
        "field",
        "grass",
        "water",
        "ocean",
        "sea",
        "lake",
        "road",
        "street",
        "room",
        "scene",
        "landscape",
        "horizon",
        "air",
    }
)


def preserve_count(n_p: int, n_v: int) -> int:
    """Instances to keep for an object described ``n_p`` times but shown ``n_v`` times.

    Equal to min(n_p, n_v): surplus instances are dropped, missing ones
    are left for regeneration.
    """
    if n_p < 1:
        raise DomainError(f"n_p must be >= 1 (object must appear in the prompt), got {n_p}")
    if n_v < 0:
        raise DomainError(f"n_v must be >= 0, got {n_v}")
    return n_p if n_p <= n_v else n_v


def select_key_objects(
    qs: QuestionSet,
    report: EvaluationReport,
    video: VideoTensor,
    mllm,
    allow_multi: bool = False,
    assets: PromptAssets | None = None,
) -> list[str]:
    """Pick which objects were generated correctly and should be kept.

    The backend (a multimodal model shown the frame grid plus the
    question/answer pairs) makes the call; when it fails, a
    deterministic fallback ranks objects by (correct answers desc,
    question total desc, name asc). Either way an all-zero report
    returns nothing: the video failed completely.
    """
    if report.dsg_score == 0.0:
        return []
    assets = assets or load_prompt_assets()
    candidates = qs.entity_objects()

    try:
        selected = _ask_backend(qs, report, video, mllm, allow_multi, candidates, assets)
    except (BackendError, ProtocolError) as exc:
        log.warning("key-object backend failed (%s); using deterministic fallback", exc)
        report.flags.append("key_object_fallback")
        selected = _fallback_selection(report, candidates, allow_multi)
    return selected


def _ask_backend(qs, report, video, mllm, allow_multi, candidates, assets) -> list[str]:
    qa_pairs = []
    for question in qs.questions:
        record = report.answer_for(question.id)
        pair = {
            "question": question.text,
            "object": question.object,
            "binary": record.binary,
        }
        if record.n_p is not None:
            pair["n_p"] = record.n_p
        if record.n_v is not None:
            pair["n_v"] = record.n_v
        qa_pairs.append(pair)

    request = {
        "task": "select_objects",
        "objects": sorted(candidates),
        "allow_multi": allow_multi,
        "qa_pairs": qa_pairs,
        "image": tensor_payload(frame_grid(video)),
        "instruction": assets.render(
            "key_object_selection",
            objects=json.dumps(sorted(candidates)),
            allow_multi=json.dumps(allow_multi),
            qa_pairs=json.dumps(qa_pairs),
        ),
    }
    reply = mllm.call("/v1/vqa", request, response_key="vqa_select_response")
    known = set(candidates)
    selected = [name for name in reply.get("objects", []) if name in known]
    if not allow_multi:
        selected = selected[:1]
    return selected


def _fallback_selection(report, candidates, allow_multi) -> list[str]:
    eligible = [
        name
        for name in candidates
        if name.lower() not in BACKGROUND_DENYLIST
        and report.per_object_scores.get(name, (0, 0))[0] >= 1
    ]
    ranked = sorted(
        eligible,
        key=lambda name: (
            -report.per_object_scores[name][0],
            -report.per_object_scores[name][1],
            name,
        ),
    )
    if allow_multi:
        return ranked
    return ranked[:1]
