"""Frame-grid assembly for multimodal question answering."""

from __future__ import annotations

import numpy as np

from ..rps import sample_keyframes
from ..tensors import VideoTensor


def frame_grid(video: VideoTensor) -> np.ndarray:
    """Tile the four sampled keyframes row-major into one (2H, 2W, C) image.

    Videos with fewer than four frames repeat their keyframes cyclically
    to fill the grid.
    """
    indices = sample_keyframes(video.frames)
    while len(indices) < 4:
        indices = (indices * 2)[:4]
    f0, f1, f2, f3 = (video.frame(i) for i in indices[:4])
    top = np.concatenate([f0, f1], axis=1)
    bottom = np.concatenate([f2, f3], axis=1)
    return np.concatenate([top, bottom], axis=0)
