"""Operator entry point: run, inspect and replay refinement pipelines.

Configuration resolves in three layers: built-in defaults, then the
JSON config file (``--config`` or ``$VIDEOREPAIR_CONFIG``), then
command-line flags. Exit codes: 0 success, 2 backend failure, 3
configuration error, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import container
from .backends.client import BackendClient
from .backends.mock import MockCluster
from .backends.roles import BackendRole
from .backends.scenarios import DEMO_PROMPT, demo_scene_scenarios
from .backends import schemas
from .errors import (
    BackendError,
    ConfigError,
    ProtocolError,
    VideoRepairError,
)
from .pipeline.artifacts import load_round_candidates, load_round_report, read_json
from .pipeline.config import PipelineConfig
from .pipeline.ranking import rank_candidates
from .pipeline.runner import run_pipeline
from .planning import (
    RefinementPlan,
    evaluate_video,
    generate_question_set,
)
from .prompts import load_prompt_assets
from .report import render_report
from .rps import build_mask
from .tensors import VideoTensor

ROLES = [role.value for role in BackendRole]


class _Emitter:
    def __init__(self, as_json: bool):
        self.as_json = as_json

    def __call__(self, event: dict, human: str) -> None:
        if self.as_json:
            print(json.dumps(event))
        else:
            print(human)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="videorepair")
    parser.add_argument("--json", action="store_true", help="emit machine-readable JSON lines")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    run = sub.add_parser("run", help="run the full refinement pipeline")
    run.add_argument("--prompt")
    _add_config_flags(run)
    run.add_argument("--k", type=int)
    run.add_argument("--iterations", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--out")
    run.set_defaults(func=cmd_run)

    ev = sub.add_parser("evaluate", help="evaluate one video against a prompt")
    ev.add_argument("--prompt", required=True)
    ev.add_argument("--video", required=True)
    ev.add_argument("--out")
    _add_config_flags(ev)
    ev.set_defaults(func=cmd_evaluate)

    mask = sub.add_parser("mask", help="build the preservation mask for a stored plan")
    mask.add_argument("--plan", required=True)
    mask.add_argument("--video", required=True)
    mask.add_argument("--out")
    _add_config_flags(mask)
    mask.set_defaults(func=cmd_mask)

    rank = sub.add_parser("rank", help="re-rank a stored round directory")
    rank.add_argument("--round-dir", required=True)
    rank.set_defaults(func=cmd_rank)

    replay = sub.add_parser("replay", help="re-rank a stored round and verify the winner")
    replay.add_argument("--round-dir", required=True)
    replay.set_defaults(func=cmd_replay)

    report = sub.add_parser("report", help="render CSV tables and figures for a finished run")
    report.add_argument("--out-dir", required=True, help="pipeline output directory")
    report.add_argument("--report-dir", help="where to write the report (default <out>/report)")
    report.set_defaults(func=cmd_report)

    mocks = sub.add_parser("mocks", help="serve the built-in demo scenario mocks")
    mocks.add_argument("--endpoints-file", help="write the role->URL map to this JSON file")
    mocks.add_argument("--serve-seconds", type=float, help="stop after this long (default: forever)")
    mocks.set_defaults(func=cmd_mocks)

    return parser


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file ($VIDEOREPAIR_CONFIG as fallback)")
    for role in ROLES:
        parser.add_argument(f"--backend.{role}", dest=f"backend_{role}", metavar="URL")


def _load_config_doc(args) -> dict:
    path = getattr(args, "config", None) or os.environ.get("VIDEOREPAIR_CONFIG")
    if not path:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    try:
        schemas.validate("config", doc)
    except ProtocolError as exc:
        raise ConfigError(f"config file {path} invalid: {exc}") from exc
    return doc


def _resolve_config(args, default_out: str | None = None) -> tuple[PipelineConfig, dict]:
    doc = _load_config_doc(args)
    backends = dict(doc.get("backends", {}))
    for role in ROLES:
        url = getattr(args, f"backend_{role}", None)
        if url:
            backends[role] = url
    doc = dict(doc)
    doc["backends"] = backends
    if getattr(args, "k", None) is not None:
        doc["k"] = args.k
    if getattr(args, "iterations", None) is not None:
        doc["max_iterations"] = args.iterations
    if getattr(args, "seed", None) is not None:
        doc["base_seed"] = args.seed
    out = getattr(args, "out", None) or doc.get("output_dir") or default_out
    if out is None:
        raise ConfigError("no output directory: pass --out or set output_dir in the config")
    doc["output_dir"] = str(out)
    try:
        cfg = PipelineConfig.from_dict(doc)
    except ValueError as exc:
        raise ConfigError(f"bad backend role in config: {exc}") from exc
    return cfg, doc


def _client(cfg: PipelineConfig) -> BackendClient:
    return BackendClient(cfg.backends, timeout=cfg.timeout, bearer_token=cfg.bearer_token)


def cmd_run(args, emit: _Emitter) -> int:
    cfg, doc = _resolve_config(args)
    prompt = args.prompt or doc.get("prompt")
    if not prompt:
        raise ConfigError("no prompt: pass --prompt or set prompt in the config")
    cfg.require_roles()
    with _client(cfg) as client:
        final, reports = run_pipeline(prompt, cfg, client)
    for report in reports:
        winner_ref = ""
        if report.winner_index is not None:
            winner_ref = str(cfg.output_dir / f"round_{report.round}" / f"cand_{report.winner_index}" / "video.vrtc")
        emit(
            {
                "event": "round",
                "round": report.round,
                "dsg": report.evaluation.dsg_score,
                "stopped_early": report.stopped_early,
                "winner_index": report.winner_index,
                "winner_path": winner_ref,
            },
            f"round {report.round}: dsg={report.evaluation.dsg_score:.4g}"
            + (" (stopped early)" if report.stopped_early else f" winner={winner_ref}"),
        )
    final_path = cfg.output_dir / "final.vrtc"
    emit({"event": "final", "path": str(final_path)}, f"final video: {final_path}")
    return 0


def cmd_evaluate(args, emit: _Emitter) -> int:
    cfg, _ = _resolve_config(args, default_out=".")
    cfg.require_roles((BackendRole.LLM_PLANNER, BackendRole.VQA))
    video = VideoTensor(container.read(args.video))
    assets = load_prompt_assets(cfg.prompt_assets_dir)
    with _client(cfg) as client:
        qs = generate_question_set(args.prompt, client.handle(BackendRole.LLM_PLANNER), assets=assets)
        report = evaluate_video(qs, video, client.handle(BackendRole.VQA), assets=assets)
    for question in qs.questions:
        record = report.answer_for(question.id)
        emit(
            {"event": "answer", "question": question.text, **record.to_dict()},
            f"  [{record.binary}] {question.text}"
            + (f" (n_p={record.n_p}, n_v={record.n_v})" if record.is_count else "")
            + ("" if record.valid else " [dependency failed]"),
        )
    emit({"event": "score", "dsg": report.dsg_score}, f"dsg={report.dsg_score:.4g}")
    if args.out:
        Path(args.out).write_text(
            json.dumps({"question_set": qs.to_dict(), "evaluation": report.to_dict()}, indent=2)
            + "\n",
            encoding="utf-8",
        )
        emit({"event": "written", "path": args.out}, f"wrote {args.out}")
    return 0


def cmd_mask(args, emit: _Emitter) -> int:
    cfg, _ = _resolve_config(args, default_out=".")
    cfg.require_roles((BackendRole.POINTER, BackendRole.SEGMENTER))
    plan = RefinementPlan.from_dict(read_json(args.plan))
    video = VideoTensor(container.read(args.video))
    with _client(cfg) as client:
        mask = build_mask(
            video, plan, client.handle(BackendRole.POINTER), client.handle(BackendRole.SEGMENTER)
        )
    out = Path(args.out or (Path(args.plan).parent / "mask.vrtc"))
    container.write(out, mask.data)
    emit(
        {"event": "mask", "path": str(out), "preserved_pixels": int(mask.data.sum())},
        f"wrote {out} (preserved pixels: {int(mask.data.sum())})",
    )
    return 0


def cmd_rank(args, emit: _Emitter) -> int:
    candidates = load_round_candidates(args.round_dir)
    winner = rank_candidates(candidates)
    emit({"event": "rank", "winner_index": winner}, f"winner_index={winner}")
    return 0


def cmd_replay(args, emit: _Emitter) -> int:
    candidates = load_round_candidates(args.round_dir)
    winner = rank_candidates(candidates)
    report = load_round_report(args.round_dir)
    match = winner == report.winner_index
    emit(
        {
            "event": "replay",
            "winner_index": winner,
            "stored_winner_index": report.winner_index,
            "match": match,
        },
        f"winner_index={winner} stored={report.winner_index} "
        + ("(reproduced)" if match else "(MISMATCH)"),
    )
    return 0 if match else 1


def cmd_report(args, emit: _Emitter) -> int:
    manifest = render_report(args.out_dir, args.report_dir)
    emit(
        {"event": "report", **manifest},
        f"wrote {manifest['report_dir']}: {', '.join(manifest['csv'] + manifest['figures'])}",
    )
    return 0


def cmd_mocks(args, emit: _Emitter) -> int:
    cluster = MockCluster(demo_scene_scenarios()).start()
    endpoints = cluster.endpoints()
    if args.endpoints_file:
        Path(args.endpoints_file).write_text(json.dumps(endpoints, indent=2) + "\n")
    emit(
        {"event": "mocks", "endpoints": endpoints, "demo_prompt": DEMO_PROMPT},
        "serving demo mocks:\n"
        + "\n".join(f"  {role}: {url}" for role, url in endpoints.items())
        + f'\ndemo prompt: "{DEMO_PROMPT}"',
    )
    try:
        if args.serve_seconds:
            time.sleep(args.serve_seconds)
        else:
            while True:
                time.sleep(3600)
    except KeyboardInterrupt:
        pass
    finally:
        cluster.stop()
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    emit = _Emitter(args.json)
    try:
        return args.func(args, emit)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3
    except (BackendError, ProtocolError) as exc:
        role = getattr(exc, "role", None)
        context = f" (role {role})" if role else ""
        print(f"backend error{context}: {exc}", file=sys.stderr)
        return 2
    except VideoRepairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
