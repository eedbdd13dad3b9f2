from .config import PipelineConfig
from .models import CandidateVideo, RoundReport, ScoredCandidate
from .ranking import rank_candidates
from .runner import RoundResult, run_pipeline, run_round
from . import artifacts

__all__ = [
    "PipelineConfig",
    "CandidateVideo",
    "RoundReport",
    "ScoredCandidate",
    "rank_candidates",
    "RoundResult",
    "run_pipeline",
    "run_round",
    "artifacts",
]
