"""Training-free text-to-video refinement engine.

Detects fine-grained prompt-video misalignments through question-based
evaluation, plans which regions to preserve versus regenerate, and
drives localized regeneration through pluggable HTTP model backends.
"""

__version__ = "0.1.0"

from . import backends, container, latentops, planning, pipeline, rps
from .errors import VideoRepairError

__all__ = [
    "backends",
    "container",
    "latentops",
    "planning",
    "pipeline",
    "rps",
    "VideoRepairError",
    "__version__",
]
