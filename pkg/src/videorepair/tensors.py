"""Pixel- and latent-space tensor wrappers with invariant checks.

Conventions used throughout the engine:

* videos are uint8 arrays shaped (T, H, W, C) with C = 3
* preservation masks are uint8 arrays shaped (T, H, W), strictly 0/1,
  where 1 means "preserve this pixel"
* latent noise is float32 shaped (T, C, h, w)
* pooled masks are float64 in memory, shaped (T, h, w), values in [0, 1]
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError


@dataclass
class VideoTensor:
    """A decoded video clip; wraps a (T, H, W, C) uint8 array."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 4:
            raise ShapeError(f"video must be (T, H, W, C), got shape {arr.shape}")
        if arr.dtype != np.uint8:
            raise ShapeError(f"video must be uint8, got {arr.dtype}")
        t, h, w, c = arr.shape
        if min(t, h, w) < 1:
            raise ShapeError("video dims must all be >= 1")
        if c != 3:
            raise ShapeError(f"video must have 3 channels, got {c}")
        self.data = arr

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def channels(self) -> int:
        return self.data.shape[3]

    def frame(self, index: int) -> np.ndarray:
        return self.data[index]


@dataclass
class MaskVolume:
    """Frame-wise binary preservation mask; 1 = preserve, 0 = refine."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3:
            raise ShapeError(f"mask must be (T, H, W), got shape {arr.shape}")
        if arr.dtype != np.uint8:
            arr = arr.astype(np.uint8)
        if not np.isin(arr, (0, 1)).all():
            raise DomainError("mask values must be exactly 0 or 1")
        self.data = arr

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def matches_video(self, video: VideoTensor) -> bool:
        return self.data.shape == video.data.shape[:3]

    def coverage(self) -> float:
        """Fraction of preserved pixels over the whole volume."""
        return float(self.data.mean())


@dataclass
class NoiseVolume:
    """Latent-space noise, (T, C, h, w) float32; all values finite."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 4:
            raise ShapeError(f"noise must be (T, C, h, w), got shape {arr.shape}")
        arr = arr.astype(np.float32, copy=False)
        if not np.isfinite(arr).all():
            raise DomainError("noise values must be finite")
        self.data = arr

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[2]

    @property
    def width(self) -> int:
        return self.data.shape[3]


@dataclass
class PooledMask:
    """Block-averaged mask at latent resolution, (T, h, w), values in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise ShapeError(f"pooled mask must be (T, h, w), got shape {arr.shape}")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise DomainError("pooled mask values must lie in [0, 1]")
        self.data = arr

    @property
    def frames(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    def complement(self) -> "PooledMask":
        return PooledMask(1.0 - self.data)


@dataclass
class PointSet:
    """Pointer-model output for one frame: fractional (x, y) hits per object."""

    frame_index: int
    points: list[tuple[float, float, str]] = field(default_factory=list)

    def __post_init__(self):
        if self.frame_index < 0:
            raise DomainError("frame_index must be >= 0")
        for x, y, _label in self.points:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise DomainError(f"point ({x}, {y}) outside [0, 1] range")
