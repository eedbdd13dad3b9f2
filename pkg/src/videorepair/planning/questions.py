"""Question-set generation through the planner backend."""

from __future__ import annotations

import logging

from ..errors import CycleError, DomainError, EmptyPlanError, ProtocolError
from ..prompts import PromptAssets, load_prompt_assets
from .models import Question, QuestionSet, SemanticTuple

log = logging.getLogger(__name__)


def generate_question_set(prompt: str, llm, assets: PromptAssets | None = None) -> QuestionSet:
    """Build the evaluation plan for ``prompt`` via the planner backend.

    The backend replies with structured tuples and questions; free-text
    replies are rejected by schema, not parsed heuristically. Malformed
    entries are dropped one by one, after which the surviving set must
    still satisfy every plan invariant (notably: exactly one count
    question per entity object).
    """
    if not prompt:
        raise DomainError("prompt must be non-empty")
    assets = assets or load_prompt_assets()
    reply = llm.call(
        "/v1/plan",
        {"prompt": prompt, "instruction": assets.render("question_generation", prompt=prompt)},
        response_key="plan_response",
    )

    tuples: list[SemanticTuple] = []
    for doc in reply.get("tuples", []):
        try:
            tuples.append(SemanticTuple.from_dict(doc))
        except (DomainError, KeyError, TypeError) as exc:
            log.warning("dropping malformed tuple %r: %s", doc, exc)
    entity_names = {t.subject for t in tuples if t.kind == "entity"}
    if not entity_names:
        raise EmptyPlanError(f"planner reply for {prompt!r} contains no entity tuples")

    questions: list[Question] = []
    for doc in reply.get("questions", []):
        try:
            q = Question.from_dict(doc)
        except (DomainError, KeyError, TypeError) as exc:
            log.warning("dropping malformed question %r: %s", doc, exc)
            continue
        if q.object not in entity_names:
            log.warning("dropping question %s: unknown object %r", q.id, q.object)
            continue
        questions.append(q)

    questions = _normalize_dependencies(questions)

    try:
        qs = QuestionSet(prompt=prompt, tuples=tuples, questions=questions)
    except (DomainError, CycleError) as exc:
        raise ProtocolError(f"planner reply is not a valid question set: {exc}") from exc
    return qs


def _normalize_dependencies(questions: list[Question]) -> list[Question]:
    """Wire every non-count question to its subject's count question.

    Relationship questions depend on the subject's count question only;
    extra planner-provided edges are kept. Dangling edges are dropped.
    """
    known = {q.id for q in questions}
    count_id = {q.object: q.id for q in questions if q.kind == "count"}
    for q in questions:
        deps = [d for d in q.depends_on if d in known and d != q.id]
        if q.kind != "count":
            anchor = count_id.get(q.object)
            if anchor is not None and anchor not in deps:
                deps.insert(0, anchor)
        q.depends_on = deps
    return questions
