"""Domain types for evaluation planning: tuples, questions, answers, plans.

A prompt decomposes into semantic tuples (entities, attributes,
relationships). Each distinct entity gets exactly one count question,
even single-instance entities, so surplus instances are penalized.
Attribute and relationship questions hang off their subject's count
question through ``depends_on`` edges, forming a DAG.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import DomainError

TUPLE_KINDS = ("entity", "attribute", "relationship")
QUESTION_KINDS = ("count", "attribute")


@dataclass
class SemanticTuple:
    id: str
    kind: str
    subject: str
    attribute_or_relation: str | None = None
    object2: str | None = None

    def __post_init__(self):
        if self.kind not in TUPLE_KINDS:
            raise DomainError(f"unknown tuple kind {self.kind!r}")
        if not self.subject:
            raise DomainError("tuple subject must be non-empty")
        if self.kind == "entity" and (self.attribute_or_relation or self.object2):
            raise DomainError("entity tuples carry no attribute or second object")
        if self.kind == "attribute" and (not self.attribute_or_relation or self.object2):
            raise DomainError("attribute tuples are (subject, attribute) pairs")
        if self.kind == "relationship" and (not self.attribute_or_relation or not self.object2):
            raise DomainError("relationship tuples are (subject, relation, object2) triples")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "kind": self.kind, "subject": self.subject}
        if self.attribute_or_relation is not None:
            out["attribute_or_relation"] = self.attribute_or_relation
        if self.object2 is not None:
            out["object2"] = self.object2
        return out

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "SemanticTuple":
        return cls(
            id=str(doc["id"]),
            kind=doc["kind"],
            subject=doc["subject"],
            attribute_or_relation=doc.get("attribute_or_relation"),
            object2=doc.get("object2"),
        )


@dataclass
class Question:
    id: str
    text: str
    kind: str
    object: str
    target_count: int | None = None
    depends_on: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in QUESTION_KINDS:
            raise DomainError(f"unknown question kind {self.kind!r}")
        if not self.text:
            raise DomainError("question text must be non-empty")
        if not self.object:
            raise DomainError("question object must be non-empty")
        if self.kind == "count":
            if self.target_count is None or self.target_count < 1:
                raise DomainError("count questions need target_count >= 1")
        elif self.target_count is not None:
            raise DomainError("only count questions carry target_count")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.id,
            "text": self.text,
            "kind": self.kind,
            "object": self.object,
            "depends_on": list(self.depends_on),
        }
        if self.target_count is not None:
            out["target_count"] = self.target_count
        return out

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "Question":
        return cls(
            id=str(doc["id"]),
            text=doc["text"],
            kind=doc["kind"],
            object=doc["object"],
            target_count=doc.get("target_count"),
            depends_on=[str(d) for d in doc.get("depends_on", [])],
        )


@dataclass
class QuestionSet:
    """The full evaluation plan for one prompt."""

    prompt: str
    tuples: list[SemanticTuple]
    questions: list[Question]

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        entity_subjects: dict[str, int] = {}
        for t in self.tuples:
            if t.kind == "entity":
                entity_subjects[t.subject] = entity_subjects.get(t.subject, 0) + 1
        for name, n in entity_subjects.items():
            if n > 1:
                raise DomainError(f"object {name!r} is the subject of {n} entity tuples")

        by_id = {q.id: q for q in self.questions}
        if len(by_id) != len(self.questions):
            raise DomainError("question ids must be unique")

        count_per_object: dict[str, int] = {}
        for q in self.questions:
            if q.object not in entity_subjects:
                raise DomainError(f"question {q.id} targets unknown object {q.object!r}")
            for dep in q.depends_on:
                if dep not in by_id:
                    raise DomainError(f"question {q.id} depends on unknown id {dep!r}")
            if q.kind == "count":
                count_per_object[q.object] = count_per_object.get(q.object, 0) + 1
        for name in entity_subjects:
            if count_per_object.get(name, 0) != 1:
                raise DomainError(
                    f"object {name!r} must have exactly one count question, "
                    f"found {count_per_object.get(name, 0)}"
                )

        order = topological_order(self.questions)
        reachable = _transitive_dependencies(self.questions)
        count_id = {q.object: q.id for q in self.questions if q.kind == "count"}
        for q in self.questions:
            if q.kind != "count" and count_id[q.object] not in reachable[q.id]:
                raise DomainError(
                    f"question {q.id} must depend on the count question of {q.object!r}"
                )
        assert len(order) == len(self.questions)

    def entity_objects(self) -> list[str]:
        """Entity object names in tuple order."""
        return [t.subject for t in self.tuples if t.kind == "entity"]

    def count_question_for(self, object_name: str) -> Question:
        for q in self.questions:
            if q.kind == "count" and q.object == object_name:
                return q
        raise DomainError(f"no count question for object {object_name!r}")

    def question_by_id(self, qid: str) -> Question:
        for q in self.questions:
            if q.id == qid:
                return q
        raise DomainError(f"no question with id {qid!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "prompt": self.prompt,
            "tuples": [t.to_dict() for t in self.tuples],
            "questions": [q.to_dict() for q in self.questions],
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "QuestionSet":
        return cls(
            prompt=doc["prompt"],
            tuples=[SemanticTuple.from_dict(t) for t in doc["tuples"]],
            questions=[Question.from_dict(q) for q in doc["questions"]],
        )


def topological_order(questions: list[Question]) -> list[Question]:
    """Kahn's algorithm; ties resolved by original list order.

    Raises :class:`CycleError` when the dependency graph has a cycle.
    """
    from ..errors import CycleError

    by_id = {q.id: q for q in questions}
    indegree = {q.id: 0 for q in questions}
    dependents: dict[str, list[str]] = {q.id: [] for q in questions}
    for q in questions:
        for dep in q.depends_on:
            if dep not in by_id:
                raise DomainError(f"question {q.id} depends on unknown id {dep!r}")
            indegree[q.id] += 1
            dependents[dep].append(q.id)

    ready = [q.id for q in questions if indegree[q.id] == 0]
    order: list[Question] = []
    position = {q.id: i for i, q in enumerate(questions)}
    while ready:
        ready.sort(key=position.__getitem__)
        current = ready.pop(0)
        order.append(by_id[current])
        for dep_id in dependents[current]:
            indegree[dep_id] -= 1
            if indegree[dep_id] == 0:
                ready.append(dep_id)
    if len(order) != len(questions):
        raise CycleError("question dependencies contain a cycle")
    return order


def _transitive_dependencies(questions: list[Question]) -> dict[str, set[str]]:
    """Map question id -> set of all ids reachable through depends_on."""
    result: dict[str, set[str]] = {}
    for q in topological_order(questions):
        deps: set[str] = set()
        for dep in q.depends_on:
            deps.add(dep)
            deps |= result.get(dep, set())
        result[q.id] = deps
    return result


@dataclass
class AnswerRecord:
    """Outcome of asking one question about one video.

    For count questions ``binary`` is recomputed from the counts:
    1 exactly when ``n_p == n_v``. A record whose dependency chain
    failed carries ``valid=False`` and its binary is forced to 0 with
    no backend call made. ``n_v`` may be None when the backend reply
    stayed unparseable after one retry; such records score 0.
    """

    question_id: str
    binary: int
    n_p: int | None = None
    n_v: int | None = None
    valid: bool = True
    raw_backend_reply: str = ""

    def __post_init__(self):
        if self.binary not in (0, 1):
            raise DomainError("binary must be 0 or 1")
        if not self.valid and self.binary != 0:
            raise DomainError("invalid records must score 0")
        if self.n_p is not None and self.n_v is not None:
            expected = 1 if self.n_p == self.n_v else 0
            if self.valid and self.binary != expected:
                raise DomainError(
                    f"count triplet inconsistent: binary={self.binary} for "
                    f"n_p={self.n_p}, n_v={self.n_v}"
                )
        if self.n_p is not None and self.n_v is None and self.binary != 0:
            raise DomainError("count record without an observed count must score 0")

    @property
    def is_count(self) -> bool:
        return self.n_p is not None

    def to_dict(self) -> dict[str, Any]:
        return {
            "question_id": self.question_id,
            "binary": self.binary,
            "n_p": self.n_p,
            "n_v": self.n_v,
            "valid": self.valid,
            "raw_backend_reply": self.raw_backend_reply,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "AnswerRecord":
        return cls(
            question_id=str(doc["question_id"]),
            binary=int(doc["binary"]),
            n_p=doc.get("n_p"),
            n_v=doc.get("n_v"),
            valid=bool(doc.get("valid", True)),
            raw_backend_reply=doc.get("raw_backend_reply", ""),
        )


@dataclass
class EvaluationReport:
    """All answers for one video plus the aggregate score."""

    answers: list[AnswerRecord]
    dsg_score: float
    per_object_scores: dict[str, tuple[int, int]]
    flags: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not 0.0 <= self.dsg_score <= 1.0:
            raise DomainError("dsg_score must lie in [0, 1]")

    def answer_for(self, question_id: str) -> AnswerRecord:
        for a in self.answers:
            if a.question_id == question_id:
                return a
        raise DomainError(f"no answer for question {question_id!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "answers": [a.to_dict() for a in self.answers],
            "dsg_score": self.dsg_score,
            "per_object_scores": {k: list(v) for k, v in self.per_object_scores.items()},
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "EvaluationReport":
        return cls(
            answers=[AnswerRecord.from_dict(a) for a in doc["answers"]],
            dsg_score=float(doc["dsg_score"]),
            per_object_scores={
                k: (int(v[0]), int(v[1])) for k, v in doc["per_object_scores"].items()
            },
            flags=list(doc.get("flags", [])),
        )


@dataclass
class RefinementPlan:
    """What to keep and how to regenerate the rest.

    ``preserved_objects`` pairs each kept object with the instance
    count to preserve; ``refinement_prompt`` drives regeneration of the
    remaining regions.
    """

    preserved_objects: list[tuple[str, int]]
    refinement_prompt: str
    fallback_paraphrase_used: bool
    original_prompt: str

    def __post_init__(self):
        for name, count in self.preserved_objects:
            if count < 1:
                raise DomainError(f"preserve count for {name!r} must be >= 1")

    @property
    def preserved_names(self) -> list[str]:
        return [name for name, _ in self.preserved_objects]

    def to_dict(self) -> dict[str, Any]:
        return {
            "preserved_objects": [
                {"object": name, "count": count} for name, count in self.preserved_objects
            ],
            "refinement_prompt": self.refinement_prompt,
            "fallback_paraphrase_used": self.fallback_paraphrase_used,
            "original_prompt": self.original_prompt,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "RefinementPlan":
        return cls(
            preserved_objects=[
                (entry["object"], int(entry["count"])) for entry in doc["preserved_objects"]
            ],
            refinement_prompt=doc["refinement_prompt"],
            fallback_paraphrase_used=bool(doc["fallback_paraphrase_used"]),
            original_prompt=doc["original_prompt"],
        )
