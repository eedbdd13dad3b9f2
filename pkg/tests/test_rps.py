import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import StubHandle, make_video
from videorepair.backends.wire import tensor_payload
from videorepair.errors import DomainError, EmptyMaskError
from videorepair.planning.models import RefinementPlan
from videorepair.rps import build_mask, pointing_prompt, replicate_keyframe_masks, sample_keyframes


class TestSampleKeyframes:
    def test_sixteen_frames(self):
        assert sample_keyframes(16) == [0, 4, 8, 12]

    def test_single_frame(self):
        assert sample_keyframes(1) == [0]

    def test_three_frames(self):
        assert sample_keyframes(3) == [0, 1, 2]

    def test_81_frames_floor_stride(self):
        assert sample_keyframes(81) == [0, 20, 40, 60]

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            sample_keyframes(0)

    @given(st.integers(4, 500))
    @settings(max_examples=100, deadline=None)
    def test_stride_rule(self, frames):
        indices = sample_keyframes(frames)
        stride = frames // 4
        assert indices == [0, stride, 2 * stride, 3 * stride]
        assert all(0 <= i < frames for i in indices)


class TestPointingPrompt:
    def test_single_bear(self):
        assert pointing_prompt("bear", 1) == "Point the biggest 1 bear"

    def test_two_people(self):
        assert pointing_prompt("people", 2) == "Point the biggest 2 people"

    def test_no_pluralization(self):
        assert pointing_prompt("dog", 3) == "Point the biggest 3 dog"

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            pointing_prompt("dog", 0)


def plan_for(*pairs):
    return RefinementPlan(
        preserved_objects=list(pairs),
        refinement_prompt="refine the rest",
        fallback_paraphrase_used=False,
        original_prompt="the original scene",
    )


def square_mask(height, width, r0, r1, c0, c1):
    mask = np.zeros((height, width), dtype=np.uint8)
    mask[r0:r1, c0:c1] = 1
    return mask


class TestBuildMask:
    def test_constant_mask_replicated_everywhere(self):
        video = make_video(16, 32, 32)
        square = square_mask(32, 32, 4, 14, 4, 14)

        pointer = StubHandle(lambda p, d: {"points": [{"x": 0.3, "y": 0.3}]})
        segmenter = StubHandle(lambda p, d: {"mask": tensor_payload(square)})
        mask = build_mask(video, plan_for(("bear", 1)), pointer, segmenter)

        assert mask.data.shape == (16, 32, 32)
        for t in range(16):
            assert (mask.data[t] == square).all()
        assert pointer.count() == 4  # one call per keyframe
        assert segmenter.count() == 4

    def test_disjoint_objects_union_areas_add(self):
        video = make_video(8, 32, 32)
        square_a = square_mask(32, 32, 0, 8, 0, 8)
        square_b = square_mask(32, 32, 16, 24, 16, 24)
        masks = {"Point the biggest 1 cat": square_a, "Point the biggest 1 dog": square_b}
        points = {"Point the biggest 1 cat": 0.1, "Point the biggest 1 dog": 0.7}
        last_prompt = {}

        def point_responder(path, doc):
            last_prompt["value"] = doc["prompt"]
            return {"points": [{"x": points[doc["prompt"]], "y": points[doc["prompt"]]}]}

        def segment_responder(path, doc):
            return {"mask": tensor_payload(masks[last_prompt["value"]])}

        mask = build_mask(
            video,
            plan_for(("cat", 1), ("dog", 1)),
            StubHandle(point_responder),
            StubHandle(segment_responder),
        )
        per_frame = int(mask.data[0].sum())
        assert per_frame == int(square_a.sum()) + int(square_b.sum())

    def test_points_truncated_to_preserve_count(self):
        video = make_video(4, 16, 16)
        square = square_mask(16, 16, 0, 4, 0, 4)
        pointer = StubHandle(
            lambda p, d: {"points": [{"x": 0.1, "y": 0.1}, {"x": 0.5, "y": 0.5}, {"x": 0.9, "y": 0.9}]}
        )
        segmenter = StubHandle(lambda p, d: {"mask": tensor_payload(square)})
        build_mask(video, plan_for(("dog", 2)), pointer, segmenter)
        # 4 keyframes (T=4 -> [0,1,2,3]), 2 of 3 points kept per keyframe
        assert segmenter.count() == 8

    def test_empty_points_raise(self):
        video = make_video(8, 16, 16)
        pointer = StubHandle(lambda p, d: {"points": []})
        segmenter = StubHandle(lambda p, d: pytest.fail("segmenter must not be called"))
        with pytest.raises(EmptyMaskError):
            build_mask(video, plan_for(("ghost", 1)), pointer, segmenter)

    def test_forward_fill_spans(self):
        # distinct masks per keyframe to check span boundaries
        video = make_video(10, 8, 8)  # keyframes [0, 2, 4, 6]
        keyframe_masks = iter(
            [square_mask(8, 8, 0, 1, 0, 8), square_mask(8, 8, 1, 2, 0, 8),
             square_mask(8, 8, 2, 3, 0, 8), square_mask(8, 8, 3, 4, 0, 8)]
        )
        produced = []

        def segment_responder(path, doc):
            mask = next(keyframe_masks)
            produced.append(mask)
            return {"mask": tensor_payload(mask)}

        pointer = StubHandle(lambda p, d: {"points": [{"x": 0.5, "y": 0.5}]})
        mask = build_mask(video, plan_for(("cat", 1)), pointer, StubHandle(segment_responder))
        spans = {0: [0, 1], 1: [2, 3], 2: [4, 5], 3: [6, 7, 8, 9]}
        for key_index, frames in spans.items():
            for t in frames:
                assert (mask.data[t] == produced[key_index]).all()

    def test_mask_monotone_under_more_objects(self):
        video = make_video(8, 16, 16)
        square_small = square_mask(16, 16, 0, 4, 0, 4)
        square_big = square_mask(16, 16, 8, 16, 8, 16)
        masks = {"Point the biggest 1 cat": square_small, "Point the biggest 1 dog": square_big}
        current = {}

        def point_responder(path, doc):
            current["prompt"] = doc["prompt"]
            return {"points": [{"x": 0.2, "y": 0.2}]}

        def segment_responder(path, doc):
            return {"mask": tensor_payload(masks[current["prompt"]])}

        one = build_mask(video, plan_for(("cat", 1)), StubHandle(point_responder), StubHandle(segment_responder))
        both = build_mask(
            video, plan_for(("cat", 1), ("dog", 1)), StubHandle(point_responder), StubHandle(segment_responder)
        )
        assert (one.data <= both.data).all()

    def test_no_preserved_objects_rejected(self):
        with pytest.raises(DomainError):
            build_mask(make_video(4, 8, 8), plan_for(), StubHandle(lambda p, d: {}), StubHandle(lambda p, d: {}))


def test_replication_idempotence():
    square = square_mask(8, 8, 2, 6, 2, 6)
    volume = replicate_keyframe_masks([square] * 4, [0, 4, 8, 12], 16)
    for t in range(16):
        assert (volume[t] == square).all()
