from .models import (
    AnswerRecord,
    EvaluationReport,
    Question,
    QuestionSet,
    RefinementPlan,
    SemanticTuple,
    topological_order,
)
from .questions import generate_question_set
from .evaluation import evaluate_video
from .selection import BACKGROUND_DENYLIST, preserve_count, select_key_objects
from .refinement import build_refinement_prompt, contains_word

__all__ = [
    "AnswerRecord",
    "EvaluationReport",
    "Question",
    "QuestionSet",
    "RefinementPlan",
    "SemanticTuple",
    "topological_order",
    "generate_question_set",
    "evaluate_video",
    "preserve_count",
    "select_key_objects",
    "build_refinement_prompt",
    "contains_word",
    "BACKGROUND_DENYLIST",
]
