"""Render run summaries: CSV tables plus matplotlib figures.

Reads the round artifacts of a finished pipeline run and writes, under
``<out>/report/``:

* ``summary.csv``    one row per round (entry score, winner, coverage)
* ``candidates.csv`` one row per candidate across all rounds
* ``scores.png``     score progression across rounds with candidate scatter
* ``mask_round_<r>.png`` preservation mask mid-frame and per-frame coverage
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import container
from .errors import FileFormatError
from .pipeline.artifacts import list_round_dirs, load_round_report


def render_report(output_dir: str | Path, report_dir: str | Path | None = None) -> dict:
    """Build all report files for the run under ``output_dir``.

    Returns a small manifest of what was written.
    """
    output_dir = Path(output_dir)
    report_dir = Path(report_dir) if report_dir else output_dir / "report"
    report_dir.mkdir(parents=True, exist_ok=True)

    round_dirs = list_round_dirs(output_dir)
    if not round_dirs:
        raise FileFormatError(f"no round directories under {output_dir}")
    reports = [load_round_report(d) for d in round_dirs]

    summary_rows = []
    candidate_rows = []
    coverages: dict[int, float | None] = {}
    for report, directory in zip(reports, round_dirs):
        coverage = None
        if report.mask_ref:
            mask = container.read(output_dir / report.mask_ref)
            coverage = float(mask.mean())
        coverages[report.round] = coverage
        winner = next(
            (c for c in report.candidates if c["index"] == report.winner_index), None
        )
        summary_rows.append(
            {
                "round": report.round,
                "entry_dsg": report.evaluation.dsg_score,
                "stopped_early": report.stopped_early,
                "winner_index": report.winner_index if winner else "",
                "winner_dsg": winner["dsg_score"] if winner else "",
                "winner_blip_bleu": winner["blip_bleu"] if winner else "",
                "n_candidates": len(report.candidates),
                "mask_coverage": coverage if coverage is not None else "",
            }
        )
        for cand in report.candidates:
            candidate_rows.append(
                {
                    "round": report.round,
                    "index": cand["index"],
                    "seed": cand["seed"],
                    "dsg_score": cand["dsg_score"],
                    "blip_bleu": cand["blip_bleu"],
                }
            )

    _write_csv(report_dir / "summary.csv", summary_rows)
    _write_csv(report_dir / "candidates.csv", candidate_rows)
    figures = [_plot_scores(reports, report_dir)]
    for report in reports:
        if report.mask_ref:
            figures.append(_plot_mask(output_dir, report, report_dir))

    return {
        "report_dir": str(report_dir),
        "rounds": len(reports),
        "csv": ["summary.csv", "candidates.csv"],
        "figures": [f.name for f in figures],
    }


def _write_csv(path: Path, rows: list[dict]) -> None:
    fields = list(rows[0].keys()) if rows else ["round"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def _plot_scores(reports, report_dir: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    rounds = [r.round for r in reports]
    entry = [r.evaluation.dsg_score for r in reports]
    ax.plot(rounds, entry, "o-", label="entry score")
    winners_x, winners_y = [], []
    for report in reports:
        for cand in report.candidates:
            ax.scatter(report.round + 0.15, cand["dsg_score"], s=12, c="gray", alpha=0.6)
        winner = next(
            (c for c in report.candidates if c["index"] == report.winner_index), None
        )
        if winner:
            winners_x.append(report.round)
            winners_y.append(winner["dsg_score"])
    if winners_x:
        ax.plot(winners_x, winners_y, "s--", label="winner score")
    ax.set_xlabel("round")
    ax.set_ylabel("alignment score")
    ax.set_ylim(-0.05, 1.05)
    ax.set_xticks(rounds)
    ax.legend(loc="lower right")
    ax.set_title("Refinement progression")
    fig.tight_layout()
    path = report_dir / "scores.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def _plot_mask(output_dir: Path, report, report_dir: Path) -> Path:
    mask = container.read(output_dir / report.mask_ref)
    mid = mask[mask.shape[0] // 2]
    per_frame = mask.reshape(mask.shape[0], -1).mean(axis=1)

    fig, (left, right) = plt.subplots(1, 2, figsize=(9, 4))
    left.imshow(mid, cmap="gray", vmin=0, vmax=1, interpolation="nearest")
    left.set_title(f"round {report.round} mask (mid frame, white = preserve)")
    left.axis("off")
    right.plot(range(len(per_frame)), per_frame, "o-")
    right.set_xlabel("frame")
    right.set_ylabel("preserved fraction")
    right.set_ylim(-0.05, 1.05)
    right.set_title("coverage per frame")
    fig.tight_layout()
    path = report_dir / f"mask_round_{report.round}.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
