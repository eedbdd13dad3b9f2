"""Round-level records: candidates and the per-round report."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from ..errors import DomainError
from ..planning.models import EvaluationReport, QuestionSet, RefinementPlan
from ..tensors import NoiseVolume, VideoTensor


@dataclass
class CandidateVideo:
    """One refined candidate; ``seed`` is pinned to ``base_seed + index``."""

    index: int
    seed: int
    video: VideoTensor
    dsg_score: float
    blip_bleu: float
    report: EvaluationReport
    noise: NoiseVolume | None = None

    def summary(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "seed": self.seed,
            "dsg_score": self.dsg_score,
            "blip_bleu": self.blip_bleu,
            "video_ref": f"cand_{self.index}/video.vrtc",
            "eval_ref": f"cand_{self.index}/eval.json",
        }


@dataclass
class ScoredCandidate:
    """The ranking-relevant slice of a candidate, as reloaded from disk."""

    index: int
    seed: int
    dsg_score: float
    blip_bleu: float


@dataclass
class RoundReport:
    """Everything one refinement round decided and produced."""

    round: int
    input_video_ref: str
    question_set: QuestionSet
    evaluation: EvaluationReport
    plan: RefinementPlan | None
    mask_ref: str | None
    candidates: list[dict[str, Any]] = field(default_factory=list)
    winner_index: int | None = None
    stopped_early: bool = False

    def __post_init__(self):
        if not self.stopped_early and self.winner_index is None:
            raise DomainError("winner_index required unless the round stopped early")

    def to_dict(self) -> dict[str, Any]:
        return {
            "round": self.round,
            "input_video_ref": self.input_video_ref,
            "question_set": self.question_set.to_dict(),
            "evaluation": self.evaluation.to_dict(),
            "plan": self.plan.to_dict() if self.plan is not None else None,
            "mask_ref": self.mask_ref,
            "candidates": list(self.candidates),
            "winner_index": self.winner_index,
            "stopped_early": self.stopped_early,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "RoundReport":
        return cls(
            round=int(doc["round"]),
            input_video_ref=doc["input_video_ref"],
            question_set=QuestionSet.from_dict(doc["question_set"]),
            evaluation=EvaluationReport.from_dict(doc["evaluation"]),
            plan=RefinementPlan.from_dict(doc["plan"]) if doc.get("plan") else None,
            mask_ref=doc.get("mask_ref"),
            candidates=list(doc.get("candidates", [])),
            winner_index=doc.get("winner_index"),
            stopped_early=bool(doc.get("stopped_early", False)),
        )
