"""Refinement-prompt construction from the non-preserved question remainder."""

from __future__ import annotations

import json
import logging
import re

from ..errors import EmptyRemainderError, ProtocolError
from ..prompts import PromptAssets, load_prompt_assets
from .models import EvaluationReport, Question, QuestionSet, RefinementPlan
from .selection import preserve_count

log = logging.getLogger(__name__)


def build_refinement_prompt(
    qs: QuestionSet,
    preserved: list[str],
    report: EvaluationReport,
    llm,
    assets: PromptAssets | None = None,
) -> RefinementPlan:
    """Turn the questions not covered by preserved objects into a regeneration prompt.

    A question belongs to the preserved side when a kept object is its
    subject or appears verbatim in its text. When the evaluation scored
    0 the whole question set is paraphrased instead and nothing is
    preserved.
    """
    assets = assets or load_prompt_assets()

    if report.dsg_score == 0.0:
        text = _call_planner(llm, qs, qs.questions, mode="paraphrase", assets=assets)
        return RefinementPlan(
            preserved_objects=[],
            refinement_prompt=text,
            fallback_paraphrase_used=True,
            original_prompt=qs.prompt,
        )

    preserved_set = list(dict.fromkeys(preserved))
    remainder = [q for q in qs.questions if not _concerns_preserved(q, preserved_set)]
    if not remainder and report.dsg_score < 1.0:
        raise EmptyRemainderError(
            "every question concerns a preserved object yet the score is below 1; "
            "the report is inconsistent"
        )

    text = ""
    if remainder:
        text = _call_planner(llm, qs, remainder, mode="refine", assets=assets)
        if not text and report.dsg_score < 1.0:
            raise ProtocolError("backend returned an empty refinement prompt")

    pairs: list[tuple[str, int]] = []
    for name in preserved_set:
        count = _preserve_count_for(qs, report, name)
        if count is None or count < 1:
            log.warning("dropping preserved object %r: nothing to keep (count %s)", name, count)
            continue
        pairs.append((name, count))

    return RefinementPlan(
        preserved_objects=pairs,
        refinement_prompt=text,
        fallback_paraphrase_used=False,
        original_prompt=qs.prompt,
    )


def _concerns_preserved(question: Question, preserved: list[str]) -> bool:
    if question.object in preserved:
        return True
    return any(contains_word(question.text, name) for name in preserved)


def contains_word(text: str, word: str) -> bool:
    """Case-insensitive whole-word containment."""
    return re.search(rf"\b{re.escape(word)}\b", text, flags=re.IGNORECASE) is not None


def _preserve_count_for(qs: QuestionSet, report: EvaluationReport, name: str) -> int | None:
    question = qs.count_question_for(name)
    record = report.answer_for(question.id)
    n_p = question.target_count
    if record.n_v is None:
        # Observed count unknown (unparsed reply or skipped question):
        # keep the prompt-specified count.
        return n_p
    return preserve_count(n_p, record.n_v)


def _call_planner(llm, qs: QuestionSet, questions: list[Question], mode: str, assets) -> str:
    texts = [q.text for q in questions]
    template = "refinement_prompt" if mode == "refine" else "paraphrase"
    reply = llm.call(
        "/v1/refineprompt",
        {
            "mode": mode,
            "original_prompt": qs.prompt,
            "questions": [q.to_dict() for q in questions],
            "instruction": assets.render(template, questions=json.dumps(texts)),
        },
        response_key="refineprompt_response",
    )
    return reply.get("refinement_prompt", "")
