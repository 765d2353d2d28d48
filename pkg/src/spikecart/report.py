"""Render figures from a run's CSV output.

Each renderer reads the delimited files the harness wrote and drops a
PNG next to them: per-seed sorted performance series, a per-step episode
trace (angle and displacement on twin axes), and episodes-to-convergence
bars.  Everything goes through the Agg backend so rendering works
headless.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def read_csv_rows(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def render_sorted_series(sorted_csvs: dict[str, Path], out_path: Path) -> Path:
    """Worst-to-best mean episode length, one line per labeled series."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label in sorted(sorted_csvs):
        rows = read_csv_rows(sorted_csvs[label])
        ranks = [int(r["rank"]) for r in rows]
        means = [float(r["mean_test_steps"]) for r in rows]
        ax.plot(ranks, means, marker="o", label=label)
    ax.set_xlabel("trial rank (worst to best)")
    ax.set_ylabel("mean test-episode steps")
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_trace(trace_csv: Path, out_path: Path) -> Path:
    """Pole angle and cart displacement per step for one episode."""
    rows = read_csv_rows(trace_csv)
    steps = [int(r["step"]) for r in rows]
    angles = [float(r["angle_deg"]) for r in rows]
    pos = [float(r["displacement_m"]) for r in rows]
    fig, ax_angle = plt.subplots(figsize=(7, 4.5))
    ax_angle.plot(steps, angles, color="tab:blue", linewidth=0.8)
    ax_angle.set_xlabel("step")
    ax_angle.set_ylabel("pole angle (deg)", color="tab:blue")
    ax_angle.set_ylim(-13, 13)
    ax_angle.axhline(12, color="tab:blue", linestyle=":", alpha=0.4)
    ax_angle.axhline(-12, color="tab:blue", linestyle=":", alpha=0.4)
    ax_pos = ax_angle.twinx()
    ax_pos.plot(steps, pos, color="tab:red", linewidth=0.8)
    ax_pos.set_ylabel("cart displacement (m)", color="tab:red")
    ax_pos.set_ylim(-2.6, 2.6)
    ax_pos.axhline(2.4, color="tab:red", linestyle=":", alpha=0.4)
    ax_pos.axhline(-2.4, color="tab:red", linestyle=":", alpha=0.4)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_convergence(summary_csv: Path, out_path: Path) -> Path:
    """Episodes needed to reach the sliding-window criterion, per seed."""
    rows = read_csv_rows(summary_csv)
    seeds = [r["seed"] for r in rows]
    episodes = [
        int(r["convergence_episode"]) if r["convergence_episode"] else 0
        for r in rows
    ]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    bars = ax.bar(range(len(seeds)), episodes, color="tab:green")
    for bar, count in zip(bars, episodes):
        if count == 0:
            bar.set_color("tab:gray")
    ax.set_xticks(range(len(seeds)))
    ax.set_xticklabels(seeds)
    ax.set_xlabel("seed (gray = did not converge in budget)")
    ax.set_ylabel("episodes to criterion")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path


def render_run_dir(out_dir) -> list[Path]:
    """Render every figure the files in a run directory support."""
    out_dir = Path(out_dir)
    written: list[Path] = []
    sorted_csvs = {
        p.parent.name: p for p in sorted(out_dir.glob("*/sorted.csv"))
    }
    if sorted_csvs:
        written.append(
            render_sorted_series(sorted_csvs, out_dir / "sorted_series.png")
        )
    for trace in sorted(out_dir.rglob("trace*.csv")):
        written.append(render_trace(trace, trace.with_suffix(".png")))
    for summary in sorted(out_dir.glob("*/convergence.csv")):
        written.append(
            render_convergence(summary, summary.parent / "convergence.png")
        )
    return written
