"""Pipeline configuration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import ConfigError
from ..backends.roles import BackendRole, REQUIRED_ROLES


@dataclass
class PipelineConfig:
    output_dir: Path
    backends: dict[str, str] = field(default_factory=dict)
    k: int = 5
    max_iterations: int = 1
    base_seed: int = 0
    d: int = 8
    allow_multi_object: bool = False
    early_stop_score: float = 1.0
    video_frames: int = 16
    video_height: int = 64
    video_width: int = 64
    latent_channels: int = 4
    timeout: float = 30.0
    max_parallel: int = 1
    bearer_token: str | None = None
    prompt_assets_dir: str | None = None

    def __post_init__(self):
        self.output_dir = Path(self.output_dir)
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.max_iterations < 1:
            raise ConfigError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0.0 < self.early_stop_score <= 1.0:
            raise ConfigError("early_stop_score must lie in (0, 1]")
        if self.d < 1:
            raise ConfigError(f"d must be >= 1, got {self.d}")
        if min(self.video_frames, self.video_height, self.video_width) < 1:
            raise ConfigError("video dims must all be >= 1")
        if self.latent_channels < 1:
            raise ConfigError("latent_channels must be >= 1")
        if self.max_parallel < 1:
            raise ConfigError("max_parallel must be >= 1")
        for role in self.backends:
            BackendRole(role)  # raises ValueError on unknown role names

    @property
    def latent_height(self) -> int:
        return math.ceil(self.video_height / self.d)

    @property
    def latent_width(self) -> int:
        return math.ceil(self.video_width / self.d)

    def require_roles(self, roles=REQUIRED_ROLES) -> None:
        for role in roles:
            if BackendRole(role).value not in self.backends:
                raise ConfigError(f"role {BackendRole(role).value} unbound")

    @classmethod
    def from_dict(cls, doc: dict[str, Any], output_dir: str | Path | None = None) -> "PipelineConfig":
        video = doc.get("video", {})
        out = doc.get("output_dir") or output_dir
        if out is None:
            raise ConfigError("output_dir missing from configuration")
        return cls(
            output_dir=Path(out),
            backends=dict(doc.get("backends", {})),
            k=doc.get("k", 5),
            max_iterations=doc.get("max_iterations", 1),
            base_seed=doc.get("base_seed", 0),
            d=doc.get("d", 8),
            allow_multi_object=doc.get("allow_multi_object", False),
            early_stop_score=doc.get("early_stop_score", 1.0),
            video_frames=video.get("frames", 16),
            video_height=video.get("height", 64),
            video_width=video.get("width", 64),
            latent_channels=doc.get("latent_channels", 4),
            timeout=doc.get("timeout", 30.0),
            max_parallel=doc.get("max_parallel", 1),
            bearer_token=doc.get("bearer_token"),
            prompt_assets_dir=doc.get("prompt_assets_dir"),
        )
