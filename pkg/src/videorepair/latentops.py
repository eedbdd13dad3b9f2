"""Deterministic numerics of localized refinement.

Three pure operations connect the pixel-space mask to the latent-space
generation request:

* :func:`pool_mask` block-averages the binary mask down to latent
  resolution, so each latent cell carries the fraction of preserved
  pixels underneath it.
* :func:`compose_noise` recombines the original noise with freshly
  sampled noise as a per-cell convex combination weighted by the pooled
  mask: ``out = eps0 * w + eps_new * (1 - w)``.
* :func:`sample_noise` draws standard-normal latent noise, reproducible
  per seed within this implementation.

All functions are pure and safe for unrestricted concurrent use.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .tensors import MaskVolume, NoiseVolume, PooledMask

__all__ = ["pool_mask", "compose_noise", "sample_noise", "make_region_spec", "RegionSpec"]


@dataclass
class RegionSpec:
    """Region-to-prompt assignment for one generation request.

    ``preserve_weight`` weights the regions reconstructed under the
    original prompt; its complement is regenerated under the refinement
    prompt.
    """

    preserve_weight: PooledMask
    preserve_prompt: str
    refine_prompt: str

    def __post_init__(self):
        if not self.preserve_prompt:
            raise DomainError("preserve_prompt must be non-empty")
        if not self.refine_prompt:
            raise DomainError("refine_prompt must be non-empty")


def pool_mask(mask: MaskVolume, d: int) -> PooledMask:
    """Block-average ``mask`` per frame with scale factor ``d``.

    Every d x d block maps to its arithmetic mean. When ``d`` does not
    divide the height or width, edge blocks average over their actual
    (smaller) pixel count, so boundary cells are not biased toward the
    refine side. Output dims are (ceil(H/d), ceil(W/d)) per frame.
    """
    if d < 1:
        raise DomainError(f"downsample factor must be >= 1, got {d}")
    data = mask.data.astype(np.float64)
    _, height, width = data.shape
    row_starts = np.arange(0, height, d)
    col_starts = np.arange(0, width, d)
    sums = np.add.reduceat(np.add.reduceat(data, row_starts, axis=1), col_starts, axis=2)
    row_counts = np.minimum(row_starts + d, height) - row_starts
    col_counts = np.minimum(col_starts + d, width) - col_starts
    counts = np.outer(row_counts, col_counts)
    return PooledMask(sums / counts[None, :, :])


def compose_noise(eps0: NoiseVolume, eps_new: NoiseVolume, pooled: PooledMask) -> NoiseVolume:
    """Convex recombination of two noise volumes weighted by the pooled mask.

    Cells with weight 1 keep ``eps0`` bit-exactly, cells with weight 0
    take ``eps_new`` bit-exactly; intermediate weights interpolate. The
    pooled mask broadcasts across the channel axis. Arithmetic runs in
    float64 and the result is stored as float32.
    """
    if eps0.data.shape != eps_new.data.shape:
        raise ShapeError(
            f"noise shapes differ: {eps0.data.shape} vs {eps_new.data.shape}"
        )
    t, _, h, w = eps0.data.shape
    if pooled.data.shape != (t, h, w):
        raise ShapeError(
            f"pooled mask shape {pooled.data.shape} does not match noise (T, h, w) = {(t, h, w)}"
        )
    weight = pooled.data[:, None, :, :]
    mixed = eps0.data.astype(np.float64) * weight + eps_new.data.astype(np.float64) * (1.0 - weight)
    return NoiseVolume(mixed.astype(np.float32))


def sample_noise(height: int, width: int, frames: int, channels: int, seed: int) -> NoiseVolume:
    """Draw standard-normal latent noise of shape (frames, channels, height, width).

    Deterministic for a given seed within this implementation; no
    cross-implementation bit-exactness is promised (noise files are
    exchanged through the container format instead).
    """
    if min(height, width, frames, channels) < 1:
        raise DomainError("all noise dims must be >= 1")
    rng = np.random.default_rng(seed % (1 << 64))
    data = rng.standard_normal((frames, channels, height, width), dtype=np.float32)
    return NoiseVolume(data)


def make_region_spec(plan, pooled: PooledMask) -> RegionSpec:
    """Pair pooled weights with the original prompt and the complement with the refinement prompt."""
    return RegionSpec(
        preserve_weight=pooled,
        preserve_prompt=plan.original_prompt,
        refine_prompt=plan.refinement_prompt,
    )
