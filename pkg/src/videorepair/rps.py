"""Region-preserving segmentation: from preserved objects to a frame-wise mask.

Keyframes are sampled at quarter-length stride, a pointing model is
asked for each preserved object on each keyframe, every returned point
is turned into a binary mask by the segmentation backend, and the
per-keyframe union is forward-filled along the temporal axis until the
next keyframe.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import numpy as np

from .backends.wire import decode_tensor_field, tensor_payload
from .errors import DomainError, EmptyMaskError, ShapeError
from .tensors import MaskVolume, VideoTensor

if TYPE_CHECKING:  # avoids a planning <-> backends import cycle
    from .planning.models import RefinementPlan

log = logging.getLogger(__name__)

POINTING_TEMPLATE = "Point the biggest {n} {obj}"


def sample_keyframes(frames: int) -> list[int]:
    """Quarter-length stride keyframe indices: {0, s, 2s, 3s} with s = floor(T/4).

    Videos shorter than four frames return every frame. Deterministic.
    """
    if frames < 1:
        raise DomainError(f"frame count must be >= 1, got {frames}")
    if frames < 4:
        return list(range(frames))
    stride = frames // 4
    return [0, stride, 2 * stride, 3 * stride]


def pointing_prompt(object_name: str, n_star: int) -> str:
    """Exact pointing-template instantiation, no pluralization."""
    if n_star < 1:
        raise DomainError(f"preserve count must be >= 1, got {n_star}")
    return POINTING_TEMPLATE.format(n=n_star, obj=object_name)


def build_mask(
    video: VideoTensor,
    plan: "RefinementPlan",
    pointer,
    segmenter,
) -> MaskVolume:
    """Assemble the binary preservation mask for every frame of ``video``.

    Per keyframe and preserved object the pointer model is queried with
    the pointing prompt; points beyond the preserve count are truncated
    in reply order. Each point becomes one segment mask and all segments
    are unioned. A keyframe with zero points across every preserved
    object raises :class:`EmptyMaskError` (preservation is impossible;
    the pipeline downgrades to full regeneration).
    """
    if not plan.preserved_objects:
        raise DomainError("plan must carry at least one preserved object")
    keyframes = sample_keyframes(video.frames)
    height, width = video.height, video.width

    keyframe_masks: list[np.ndarray] = []
    for index in keyframes:
        frame_image = tensor_payload(video.frame(index))
        union = np.zeros((height, width), dtype=np.uint8)
        total_points = 0
        for object_name, n_star in plan.preserved_objects:
            points = _point(pointer, frame_image, object_name, n_star)
            total_points += len(points)
            for x, y in points:
                segment = _segment(segmenter, frame_image, x, y, (height, width))
                union |= segment
        if total_points == 0:
            raise EmptyMaskError(
                f"keyframe {index} produced no points for any preserved object"
            )
        keyframe_masks.append(union)

    return MaskVolume(replicate_keyframe_masks(keyframe_masks, keyframes, video.frames))


def replicate_keyframe_masks(
    masks: list[np.ndarray], keyframes: list[int], frames: int
) -> np.ndarray:
    """Forward-fill each keyframe mask over [k_i, k_{i+1}); the last one runs to T-1."""
    if len(masks) != len(keyframes):
        raise ShapeError("one mask per keyframe required")
    volume = np.zeros((frames,) + masks[0].shape, dtype=np.uint8)
    bounds = list(keyframes[1:]) + [frames]
    for mask, start, stop in zip(masks, keyframes, bounds):
        volume[start:stop] = mask
    return volume


def _point(pointer, frame_image, object_name: str, n_star: int) -> list[tuple[float, float]]:
    reply = pointer.call(
        "/v1/point",
        {"image": frame_image, "prompt": pointing_prompt(object_name, n_star)},
        response_key="point_response",
    )
    points = [(p["x"], p["y"]) for p in reply.get("points", [])]
    # The pointer ranks its hits; keep the first n_star.
    return points[:n_star]


def _segment(segmenter, frame_image, x: float, y: float, dims: tuple[int, int]) -> np.ndarray:
    reply = segmenter.call(
        "/v1/segment",
        {"image": frame_image, "point": {"x": x, "y": y}},
        response_key="segment_response",
    )
    mask = decode_tensor_field(reply["mask"])
    if mask.shape != dims:
        raise ShapeError(f"segment mask shape {mask.shape} does not match frame {dims}")
    return (mask > 0).astype(np.uint8)
