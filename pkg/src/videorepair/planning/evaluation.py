"""Video evaluation: ask every question, honor dependencies, score.

Questions are asked in topological order against a single 2x2 frame
grid sampled from the video. A question whose direct dependency scored
0 is recorded as invalid with binary 0 and costs no backend call. Count
questions return an observed count ``n_v``; the binary is recomputed
engine-side from ``n_p == n_v`` because the prompt, not the answering
model, is the source of truth for ``n_p``.
"""

from __future__ import annotations

import json
import logging

from ..backends.grid import frame_grid
from ..backends.wire import tensor_payload
from ..errors import ParseError, ProtocolError
from ..prompts import PromptAssets, load_prompt_assets
from ..tensors import VideoTensor
from .models import AnswerRecord, EvaluationReport, Question, QuestionSet, topological_order

log = logging.getLogger(__name__)


def evaluate_video(
    qs: QuestionSet,
    video: VideoTensor,
    mllm,
    assets: PromptAssets | None = None,
) -> EvaluationReport:
    """Run the full question set against ``video`` and aggregate the score."""
    assets = assets or load_prompt_assets()
    grid = frame_grid(video)
    image = tensor_payload(grid)

    answers: dict[str, AnswerRecord] = {}
    for question in topological_order(qs.questions):
        failed_dep = any(
            answers[dep].binary == 0 for dep in question.depends_on if dep in answers
        )
        if failed_dep:
            answers[question.id] = AnswerRecord(
                question_id=question.id,
                binary=0,
                n_p=question.target_count,
                n_v=None,
                valid=False,
                raw_backend_reply="",
            )
            continue
        answers[question.id] = _ask(question, image, mllm, assets)

    ordered = [answers[q.id] for q in qs.questions]
    per_object: dict[str, tuple[int, int]] = {}
    for question in qs.questions:
        correct, total = per_object.get(question.object, (0, 0))
        per_object[question.object] = (correct + answers[question.id].binary, total + 1)
    score = sum(a.binary for a in ordered) / len(ordered) if ordered else 0.0
    return EvaluationReport(answers=ordered, dsg_score=score, per_object_scores=per_object)


def _ask(question: Question, image: dict, mllm, assets: PromptAssets) -> AnswerRecord:
    """One backend call, retried once when the reply cannot be parsed."""
    try:
        return _ask_once(question, image, mllm, assets)
    except (ParseError, ProtocolError) as exc:
        log.warning("retrying question %s after bad reply: %s", question.id, exc)
    try:
        return _ask_once(question, image, mllm, assets)
    except (ParseError, ProtocolError) as exc:
        raw = getattr(exc, "body", None) or str(exc)
        log.warning("question %s failed twice, scoring 0: %s", question.id, exc)
        return AnswerRecord(
            question_id=question.id,
            binary=0,
            n_p=question.target_count,
            n_v=None,
            valid=True,
            raw_backend_reply=raw,
        )


def _ask_once(question: Question, image: dict, mllm, assets: PromptAssets) -> AnswerRecord:
    if question.kind == "count":
        request = {
            "task": "count",
            "question": question.text,
            "object": question.object,
            "n_p": question.target_count,
            "image": image,
            "instruction": assets.render(
                "vqa_count",
                question=question.text,
                object=question.object,
                n_p=question.target_count,
            ),
        }
        reply = mllm.call("/v1/vqa", request, response_key="vqa_count_response")
        raw = json.dumps(reply, sort_keys=True)
        n_v = reply.get("n_v")
        if not isinstance(n_v, int) or n_v < 0:
            raise ParseError("count reply lacks a usable n_v", body=raw)
        n_p = question.target_count
        return AnswerRecord(
            question_id=question.id,
            binary=1 if n_p == n_v else 0,
            n_p=n_p,
            n_v=n_v,
            valid=True,
            raw_backend_reply=raw,
        )

    request = {
        "task": "attribute",
        "question": question.text,
        "object": question.object,
        "image": image,
        "instruction": assets.render("vqa_attribute", question=question.text),
    }
    reply = mllm.call("/v1/vqa", request, response_key="vqa_attribute_response")
    raw = json.dumps(reply, sort_keys=True)
    answer = reply.get("answer")
    if answer not in ("yes", "no"):
        raise ParseError("attribute reply lacks a yes/no answer", body=raw)
    return AnswerRecord(
        question_id=question.id,
        binary=1 if answer == "yes" else 0,
        valid=True,
        raw_backend_reply=raw,
    )
