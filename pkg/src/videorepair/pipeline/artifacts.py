"""On-disk layout of pipeline artifacts.

    <out>/round_<r>/input.vrtc
                    mask.vrtc            (absent when the round stopped early)
                    plan.json            (absent when the round stopped early)
                    report.json
                    cand_<i>/noise.vrtc  (the composed generation noise)
                            video.vrtc
                            eval.json
    <out>/final.vrtc

All references inside JSON artifacts are relative to <out> so that an
output tree is position-independent and byte-reproducible.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .. import container
from ..errors import FileFormatError
from .models import RoundReport, ScoredCandidate


def round_dir(output_dir: str | Path, round_index: int) -> Path:
    return Path(output_dir) / f"round_{round_index}"


def write_json(path: str | Path, doc) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


def read_json(path: str | Path):
    path = Path(path)
    if not path.is_file():
        raise FileFormatError(f"missing artifact {path}")
    return json.loads(path.read_text(encoding="utf-8"))


def write_tensor(path: str | Path, array: np.ndarray) -> Path:
    return container.write(path, array)


def load_round_report(directory: str | Path) -> RoundReport:
    return RoundReport.from_dict(read_json(Path(directory) / "report.json"))


def load_round_candidates(directory: str | Path) -> list[ScoredCandidate]:
    """Reload the ranking-relevant candidate scores from a round directory."""
    directory = Path(directory)
    out: list[ScoredCandidate] = []
    for cand_dir in sorted(directory.glob("cand_*"), key=lambda p: int(p.name.split("_")[1])):
        doc = read_json(cand_dir / "eval.json")
        out.append(
            ScoredCandidate(
                index=int(doc["index"]),
                seed=int(doc["seed"]),
                dsg_score=float(doc["dsg_score"]),
                blip_bleu=float(doc["blip_bleu"]),
            )
        )
    return out


def list_round_dirs(output_dir: str | Path) -> list[Path]:
    output_dir = Path(output_dir)
    dirs = [p for p in output_dir.glob("round_*") if p.is_dir()]
    return sorted(dirs, key=lambda p: int(p.name.split("_")[1]))
