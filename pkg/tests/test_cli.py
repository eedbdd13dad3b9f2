import json

import numpy as np
import pytest

from conftest import make_video
from videorepair import container
from videorepair.backends.client import BackendClient
from videorepair.backends.mock import MockCluster
from videorepair.backends.scenarios import (
    DEMO_PROMPT,
    demo_scene_scenarios,
    demo_segment_mask,
)
from videorepair.cli import main
from videorepair.pipeline.config import PipelineConfig
from videorepair.pipeline.runner import run_pipeline


@pytest.fixture
def demo_env(tmp_path):
    """Running mocks plus a config file pointing at them."""
    with MockCluster(demo_scene_scenarios(k=2)) as cluster:
        config = {
            "backends": cluster.endpoints(),
            "k": 2,
            "base_seed": 11,
            "video": {"frames": 16, "height": 64, "width": 64},
        }
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(config))
        yield cluster, config_path, tmp_path


def test_run_creates_round_dirs_and_final(demo_env, capsys):
    cluster, config_path, tmp_path = demo_env
    out = tmp_path / "out"
    code = main(
        ["run", "--prompt", DEMO_PROMPT, "--config", str(config_path), "--out", str(out)]
    )
    assert code == 0
    assert (out / "round_1" / "report.json").is_file()
    assert (out / "round_1" / "plan.json").is_file()
    assert (out / "round_1" / "mask.vrtc").is_file()
    assert (out / "final.vrtc").is_file()
    stdout = capsys.readouterr().out
    assert "dsg=0.5" in stdout
    assert "final video:" in stdout


def test_run_json_mode_emits_json_lines(demo_env, capsys):
    cluster, config_path, tmp_path = demo_env
    out = tmp_path / "out"
    code = main(
        ["--json", "run", "--prompt", DEMO_PROMPT, "--config", str(config_path), "--out", str(out)]
    )
    assert code == 0
    lines = [json.loads(line) for line in capsys.readouterr().out.strip().splitlines()]
    events = [line["event"] for line in lines]
    assert events == ["round", "final"]
    assert lines[0]["dsg"] == 0.5


def test_missing_t2v_endpoint_exits_3(demo_env, capsys):
    cluster, config_path, tmp_path = demo_env
    config = json.loads(config_path.read_text())
    del config["backends"]["t2v"]
    config_path.write_text(json.dumps(config))
    code = main(
        ["run", "--prompt", DEMO_PROMPT, "--config", str(config_path), "--out", str(tmp_path / "o")]
    )
    assert code == 3
    assert "role t2v unbound" in capsys.readouterr().err


def test_backend_flag_overrides_config(demo_env, capsys):
    cluster, config_path, tmp_path = demo_env
    config = json.loads(config_path.read_text())
    del config["backends"]["t2v"]
    config_path.write_text(json.dumps(config))
    code = main(
        [
            "run",
            "--prompt", DEMO_PROMPT,
            "--config", str(config_path),
            "--out", str(tmp_path / "o"),
            f"--backend.t2v={cluster.endpoints()['t2v']}",
        ]
    )
    assert code == 0


def test_env_var_config_fallback(demo_env, capsys, monkeypatch):
    cluster, config_path, tmp_path = demo_env
    monkeypatch.setenv("VIDEOREPAIR_CONFIG", str(config_path))
    code = main(["run", "--prompt", DEMO_PROMPT, "--out", str(tmp_path / "env_out")])
    assert code == 0
    assert (tmp_path / "env_out" / "final.vrtc").is_file()


def test_evaluate_prints_score(demo_env, capsys, tmp_path):
    cluster, config_path, _ = demo_env
    # Perfect scenario: a separate cluster whose answers are all correct.
    with MockCluster(demo_scene_scenarios(k=2, misaligned_entry=False)) as perfect:
        config = {"backends": perfect.endpoints()}
        cfg_path = tmp_path / "cfg2.json"
        cfg_path.write_text(json.dumps(config))
        video_path = tmp_path / "input.vrtc"
        container.write(video_path, make_video(16, 64, 64, seed=1).data)
        code = main(
            ["evaluate", "--prompt", DEMO_PROMPT, "--video", str(video_path), "--config", str(cfg_path)]
        )
    assert code == 0
    assert "dsg=1" in capsys.readouterr().out


def test_mask_subcommand_matches_golden_pixel_count(demo_env, tmp_path, capsys):
    cluster, config_path, _ = demo_env
    plan_path = tmp_path / "plan.json"
    plan_path.write_text(
        json.dumps(
            {
                "preserved_objects": [{"object": "bear", "count": 1}],
                "refinement_prompt": "two people making one pizza",
                "fallback_paraphrase_used": False,
                "original_prompt": DEMO_PROMPT,
            }
        )
    )
    video_path = tmp_path / "input.vrtc"
    container.write(video_path, make_video(16, 64, 64, seed=2).data)
    out_path = tmp_path / "mask.vrtc"
    code = main(
        [
            "mask",
            "--plan", str(plan_path),
            "--video", str(video_path),
            "--out", str(out_path),
            "--config", str(config_path),
        ]
    )
    assert code == 0
    mask = container.read(out_path)
    # golden: the scripted square covers (64/4)^2 pixels on each of 16 frames
    assert mask.shape == (16, 64, 64)
    assert int(mask.sum()) == 16 * 16 * 16
    assert (mask[0] == demo_segment_mask(64, 64)).all()


def _run_pipeline_to(tmp_path, k=2):
    with MockCluster(demo_scene_scenarios(k=k)) as cluster:
        cfg = PipelineConfig(
            output_dir=tmp_path / "out",
            backends=cluster.endpoints(),
            k=k,
            base_seed=11,
        )
        with BackendClient(cfg.backends, timeout=10) as client:
            _, reports = run_pipeline(DEMO_PROMPT, cfg, client)
    return cfg.output_dir, reports


def test_run_two_iterations_creates_two_round_dirs(tmp_path, capsys):
    from conftest import two_round_scenarios

    with MockCluster(two_round_scenarios()) as cluster:
        config = {
            "backends": cluster.endpoints(),
            "k": 1,
            "base_seed": 7,
            "video": {"frames": 8, "height": 32, "width": 32},
        }
        config_path = tmp_path / "config.json"
        config_path.write_text(json.dumps(config))
        out = tmp_path / "out"
        code = main(
            [
                "run",
                "--prompt", "a cat, a dog, a bird and a fish",
                "--config", str(config_path),
                "--iterations", "2",
                "--out", str(out),
            ]
        )
    assert code == 0
    assert (out / "round_1" / "report.json").is_file()
    assert (out / "round_2" / "report.json").is_file()
    assert not (out / "round_3").exists()
    stdout = capsys.readouterr().out
    assert "round 1: dsg=0.5" in stdout
    assert "round 2: dsg=0.75" in stdout


def test_rank_reproduces_stored_winner(tmp_path, capsys):
    out, reports = _run_pipeline_to(tmp_path)
    code = main(["rank", "--round-dir", str(out / "round_1")])
    assert code == 0
    assert f"winner_index={reports[0].winner_index}" in capsys.readouterr().out


def test_replay_verifies_winner(tmp_path, capsys):
    out, _ = _run_pipeline_to(tmp_path)
    assert main(["replay", "--round-dir", str(out / "round_1")]) == 0
    assert "(reproduced)" in capsys.readouterr().out


def test_replay_detects_mismatch(tmp_path, capsys):
    out, _ = _run_pipeline_to(tmp_path)
    report_path = out / "round_1" / "report.json"
    doc = json.loads(report_path.read_text())
    doc["winner_index"] = (doc["winner_index"] + 1) % 2
    report_path.write_text(json.dumps(doc))
    assert main(["replay", "--round-dir", str(out / "round_1")]) == 1
    assert "MISMATCH" in capsys.readouterr().out


def test_report_renders_csv_and_figures(tmp_path, capsys):
    out, _ = _run_pipeline_to(tmp_path)
    code = main(["report", "--out-dir", str(out)])
    assert code == 0
    report_dir = out / "report"
    assert (report_dir / "summary.csv").is_file()
    assert (report_dir / "candidates.csv").is_file()
    assert (report_dir / "scores.png").is_file()
    assert (report_dir / "mask_round_1.png").is_file()
    header = (report_dir / "summary.csv").read_text().splitlines()[0]
    assert header.startswith("round,entry_dsg,stopped_early,winner_index")


def test_bad_container_file_reported(tmp_path, capsys):
    bad = tmp_path / "bad.vrtc"
    bad.write_bytes(b"JUNKJUNKJUNK")
    code = main(["evaluate", "--prompt", "x", "--video", str(bad), "--backend.llm_planner=http://127.0.0.1:1", "--backend.vqa=http://127.0.0.1:1"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_mocks_subcommand_serves_and_writes_endpoints(tmp_path, capsys):
    endpoints_file = tmp_path / "endpoints.json"
    code = main(
        ["mocks", "--endpoints-file", str(endpoints_file), "--serve-seconds", "0.2"]
    )
    assert code == 0
    endpoints = json.loads(endpoints_file.read_text())
    assert sorted(endpoints) == ["llm_planner", "pointer", "scorer", "segmenter", "t2v", "vqa"]
