"""The outer refinement loop: evaluate, plan, mask, regenerate, rank, iterate.

One round runs the four-step cycle against the current input video:

1. evaluate the input against the question set (early-stop when the
   score already meets the threshold — no pointer, segmenter or
   generation call is made in that case),
2. select key objects and build the refinement plan,
3. build the preservation mask and pool it to latent resolution,
4. fan out k candidates (fresh noise per seed, composed with the kept
   noise, one generation request each), evaluate and rank them.

The winner of a round — not the best-ever across rounds — feeds the
next round. Candidate branches are independent; failures are logged and
skipped, and the round fails only when every branch failed.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..backends.client import BackendClient
from ..backends.roles import BackendRole
from ..backends.wire import decode_tensor_field, tensor_payload
from ..errors import (
    AllCandidatesFailedError,
    BackendError,
    EmptyMaskError,
    ProtocolError,
    ShapeError,
    VideoRepairError,
)
from ..latentops import compose_noise, pool_mask, sample_noise
from ..planning import (
    QuestionSet,
    RefinementPlan,
    build_refinement_prompt,
    evaluate_video,
    generate_question_set,
    select_key_objects,
)
from ..prompts import PromptAssets, load_prompt_assets
from ..rps import build_mask
from ..tensors import MaskVolume, NoiseVolume, PooledMask, VideoTensor
from .artifacts import round_dir, write_json, write_tensor
from .config import PipelineConfig
from .models import CandidateVideo, RoundReport
from .ranking import rank_candidates

log = logging.getLogger(__name__)


@dataclass
class RoundResult:
    report: RoundReport
    winner_video: VideoTensor
    winner_noise: NoiseVolume
    winner_score: float


def run_round(
    prompt: str,
    video: VideoTensor,
    cfg: PipelineConfig,
    client: BackendClient,
    *,
    question_set: QuestionSet | None = None,
    input_noise: NoiseVolume | None = None,
    round_index: int = 1,
    assets: PromptAssets | None = None,
) -> RoundResult:
    """Run one refinement round and persist its artifacts."""
    assets = assets or load_prompt_assets(cfg.prompt_assets_dir)
    directory = round_dir(cfg.output_dir, round_index)
    directory.mkdir(parents=True, exist_ok=True)
    input_ref = f"round_{round_index}/input.vrtc"
    write_tensor(directory / "input.vrtc", video.data)

    llm = client.handle(BackendRole.LLM_PLANNER)
    vqa = client.handle(BackendRole.VQA)

    if question_set is None:
        question_set = generate_question_set(prompt, llm, assets=assets)
    if input_noise is None:
        input_noise = sample_noise(
            cfg.latent_height, cfg.latent_width, cfg.video_frames, cfg.latent_channels,
            cfg.base_seed,
        )

    evaluation = evaluate_video(question_set, video, vqa, assets=assets)
    log.info("round %d entry score %.4f", round_index, evaluation.dsg_score)

    if evaluation.dsg_score >= cfg.early_stop_score:
        report = RoundReport(
            round=round_index,
            input_video_ref=input_ref,
            question_set=question_set,
            evaluation=evaluation,
            plan=None,
            mask_ref=None,
            candidates=[],
            winner_index=None,
            stopped_early=True,
        )
        write_json(directory / "report.json", report.to_dict())
        return RoundResult(report, video, input_noise, evaluation.dsg_score)

    preserved = select_key_objects(
        question_set, evaluation, video, vqa, cfg.allow_multi_object, assets=assets
    )
    plan = build_refinement_prompt(question_set, preserved, evaluation, llm, assets=assets)
    write_json(directory / "plan.json", plan.to_dict())

    mask = _build_mask_or_downgrade(video, plan, client)
    write_tensor(directory / "mask.vrtc", mask.data)
    pooled = pool_mask(mask, cfg.d)

    candidates = _generate_candidates(
        prompt, video, mask, pooled, plan, question_set, cfg, client, directory, assets,
        input_noise,
    )
    winner_index = rank_candidates(candidates)
    winner = next(c for c in candidates if c.index == winner_index)

    report = RoundReport(
        round=round_index,
        input_video_ref=input_ref,
        question_set=question_set,
        evaluation=evaluation,
        plan=plan,
        mask_ref=f"round_{round_index}/mask.vrtc",
        candidates=[c.summary() for c in candidates],
        winner_index=winner_index,
        stopped_early=False,
    )
    write_json(directory / "report.json", report.to_dict())
    return RoundResult(report, winner.video, winner.noise, winner.dsg_score)


def run_pipeline(
    prompt: str,
    cfg: PipelineConfig,
    client: BackendClient,
) -> tuple[VideoTensor, list[RoundReport]]:
    """Generate the initial video, then refine it for up to max_iterations rounds."""
    cfg.require_roles()
    assets = load_prompt_assets(cfg.prompt_assets_dir)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)

    noise = sample_noise(
        cfg.latent_height, cfg.latent_width, cfg.video_frames, cfg.latent_channels,
        cfg.base_seed,
    )
    video = _initial_generation(prompt, noise, cfg, client)

    llm = client.handle(BackendRole.LLM_PLANNER)
    question_set = generate_question_set(prompt, llm, assets=assets)

    reports: list[RoundReport] = []
    for round_index in range(1, cfg.max_iterations + 1):
        result = run_round(
            prompt,
            video,
            cfg,
            client,
            question_set=question_set,
            input_noise=noise,
            round_index=round_index,
            assets=assets,
        )
        reports.append(result.report)
        video, noise = result.winner_video, result.winner_noise
        if result.report.stopped_early:
            break
        if result.winner_score >= cfg.early_stop_score:
            log.info("round %d winner reached %.4f; stopping", round_index, result.winner_score)
            break

    write_tensor(cfg.output_dir / "final.vrtc", video.data)
    return video, reports


def _initial_generation(
    prompt: str, noise: NoiseVolume, cfg: PipelineConfig, client: BackendClient
) -> VideoTensor:
    t2v = client.handle(BackendRole.T2V)
    weights = np.ones((cfg.video_frames, cfg.latent_height, cfg.latent_width), dtype=np.float32)
    request = {
        "prompt_regions": [{"weights": tensor_payload(weights), "prompt": prompt}],
        "noise": tensor_payload(noise.data, workdir=cfg.output_dir),
        "dims": {
            "frames": cfg.video_frames,
            "height": cfg.video_height,
            "width": cfg.video_width,
        },
        "seed": cfg.base_seed,
        "d": cfg.d,
    }
    reply = t2v.call("/v1/generate", request)
    return VideoTensor(decode_tensor_field(reply["video"]))


def _build_mask_or_downgrade(
    video: VideoTensor, plan: RefinementPlan, client: BackendClient
) -> MaskVolume:
    """Full mask, or an all-zero mask when preservation is impossible."""
    if not plan.preserved_objects:
        return MaskVolume(np.zeros((video.frames, video.height, video.width), dtype=np.uint8))
    try:
        mask = build_mask(
            video, plan, client.handle(BackendRole.POINTER), client.handle(BackendRole.SEGMENTER)
        )
    except EmptyMaskError as exc:
        log.warning("downgrading to full regeneration: %s", exc)
        return MaskVolume(np.zeros((video.frames, video.height, video.width), dtype=np.uint8))
    if not mask.matches_video(video):
        raise ShapeError("mask dims do not match the video")
    return mask


def _merged_prompt(plan: RefinementPlan) -> str:
    """Prompt for full regeneration: the original joined with the refinement text."""
    if plan.fallback_paraphrase_used or not plan.refinement_prompt:
        return plan.refinement_prompt or plan.original_prompt
    return f"{plan.original_prompt.rstrip('.')}. {plan.refinement_prompt}"


def _region_payload(
    plan: RefinementPlan, pooled: PooledMask, workdir
) -> list[dict]:
    preserve = pooled.data
    if float(preserve.max()) == 0.0:
        # Nothing preserved: one region under the combined prompt.
        ones = np.ones_like(preserve, dtype=np.float32)
        return [{"weights": tensor_payload(ones, workdir), "prompt": _merged_prompt(plan)}]
    complement = 1.0 - preserve
    if not np.allclose(preserve + complement, 1.0, atol=1e-9):
        raise ShapeError("region weights do not cover the grid")
    return [
        {
            "weights": tensor_payload(preserve.astype(np.float32), workdir),
            "prompt": plan.original_prompt,
        },
        {
            "weights": tensor_payload(complement.astype(np.float32), workdir),
            "prompt": plan.refinement_prompt or plan.original_prompt,
        },
    ]


def _generate_candidates(
    prompt: str,
    video: VideoTensor,
    mask: MaskVolume,
    pooled: PooledMask,
    plan: RefinementPlan,
    question_set: QuestionSet,
    cfg: PipelineConfig,
    client: BackendClient,
    directory,
    assets: PromptAssets,
    eps0: NoiseVolume,
) -> list[CandidateVideo]:
    def branch(index: int) -> CandidateVideo:
        return _one_candidate(
            index, prompt, video, mask, pooled, plan, question_set, cfg, client,
            directory, assets, eps0,
        )

    candidates: list[CandidateVideo] = []
    failures: list[str] = []
    if cfg.max_parallel > 1:
        with ThreadPoolExecutor(max_workers=cfg.max_parallel) as pool:
            futures = {i: pool.submit(branch, i) for i in range(cfg.k)}
            for i in range(cfg.k):
                try:
                    candidates.append(futures[i].result())
                except VideoRepairError as exc:
                    failures.append(f"candidate {i}: {exc}")
                    log.warning("skipping failed candidate %d: %s", i, exc)
    else:
        for i in range(cfg.k):
            try:
                candidates.append(branch(i))
            except VideoRepairError as exc:
                failures.append(f"candidate {i}: {exc}")
                log.warning("skipping failed candidate %d: %s", i, exc)

    if not candidates:
        raise AllCandidatesFailedError(
            "all candidate branches failed: " + "; ".join(failures)
        )
    return candidates


def _one_candidate(
    index: int,
    prompt: str,
    video: VideoTensor,
    mask: MaskVolume,
    pooled: PooledMask,
    plan: RefinementPlan,
    question_set: QuestionSet,
    cfg: PipelineConfig,
    client: BackendClient,
    directory,
    assets: PromptAssets,
    eps0: NoiseVolume,
) -> CandidateVideo:
    seed = cfg.base_seed + index
    eps_new = sample_noise(
        cfg.latent_height, cfg.latent_width, cfg.video_frames, cfg.latent_channels, seed
    )
    eps_star = compose_noise(eps0, eps_new, pooled)

    cand_dir = directory / f"cand_{index}"
    cand_dir.mkdir(parents=True, exist_ok=True)
    write_tensor(cand_dir / "noise.vrtc", eps_star.data)

    request = {
        "prompt_regions": _region_payload(plan, pooled, cand_dir),
        "noise": tensor_payload(eps_star.data, workdir=cand_dir),
        "dims": {
            "frames": cfg.video_frames,
            "height": cfg.video_height,
            "width": cfg.video_width,
        },
        "seed": seed,
        "d": cfg.d,
        "reference": {
            "video": tensor_payload(video.data, workdir=cand_dir),
            "pixel_mask": tensor_payload(mask.data, workdir=cand_dir),
        },
    }
    reply = client.call(BackendRole.T2V, "/v1/generate", request)
    cand_video = VideoTensor(decode_tensor_field(reply["video"]))
    write_tensor(cand_dir / "video.vrtc", cand_video.data)

    report = evaluate_video(question_set, cand_video, client.handle(BackendRole.VQA), assets=assets)
    blip_bleu = _score_candidate(prompt, cand_video, cfg, client)

    candidate = CandidateVideo(
        index=index,
        seed=seed,
        video=cand_video,
        dsg_score=report.dsg_score,
        blip_bleu=blip_bleu,
        report=report,
        noise=eps_star,
    )
    write_json(
        cand_dir / "eval.json",
        {
            "index": index,
            "seed": seed,
            "dsg_score": report.dsg_score,
            "blip_bleu": blip_bleu,
            "report": report.to_dict(),
        },
    )
    return candidate


def _score_candidate(
    prompt: str, video: VideoTensor, cfg: PipelineConfig, client: BackendClient
) -> float:
    # The caption scorer only breaks ties; without one every candidate
    # scores 0 and ties degrade to the index rule.
    if not client.has_role(BackendRole.SCORER):
        return 0.0
    try:
        reply = client.call(
            BackendRole.SCORER,
            "/v1/score",
            {"prompt": prompt, "video": tensor_payload(video.data, workdir=cfg.output_dir)},
        )
    except (BackendError, ProtocolError) as exc:
        log.warning("scorer failed (%s); using 0.0", exc)
        return 0.0
    return float(reply["score"])
