"""Matplotlib figures rendered alongside the delimited report outputs.

All figures are written as PNG with fixed dpi and stripped software
metadata so a rerun from the same inputs is byte-identical.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .diagnostics import DiagnosticsReport
from .echo import LoopTrajectory

__all__ = ["save_ensemble_figures", "save_trajectory_figure"]

_SAVE_KW = dict(dpi=120, metadata={"Software": None})


def save_ensemble_figures(report: DiagnosticsReport, output_dir) -> list[str]:
    """Write Q-by-seed, pairwise-similarity and co-classification figures;
    returns the written file names."""
    written = []

    seeds = [str(r.seed) for r in report.runs]
    qs = [r.q for r in report.runs]
    counts = [r.num_communities for r in report.runs]

    fig, (ax_q, ax_k) = plt.subplots(2, 1, figsize=(7, 5), sharex=True)
    ax_q.bar(seeds, qs, color="#4363d8")
    ax_q.set_ylabel("Q")
    ax_q.set_title("Detection outcome by seed")
    ax_k.bar(seeds, counts, color="#3cb44b")
    ax_k.set_ylabel("communities")
    ax_k.set_xlabel("seed")
    fig.tight_layout()
    path = output_dir / "q_by_seed.png"
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    written.append(path.name)

    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(report.pairwise, interpolation="nearest", cmap="viridis")
    ax.set_xticks(range(len(seeds)), seeds)
    ax.set_yticks(range(len(seeds)), seeds)
    ax.set_xlabel("seed")
    ax.set_ylabel("seed")
    ax.set_title(f"Pairwise partition similarity ({report.metric})")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    path = output_dir / "pairwise_similarity.png"
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    written.append(path.name)

    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(report.coclassification, interpolation="nearest",
                   cmap="magma", vmin=0.0, vmax=1.0)
    ax.set_title("Co-classification fraction")
    ax.set_xlabel("node")
    ax.set_ylabel("node")
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    path = output_dir / "coclassification.png"
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    written.append(path.name)
    return written


def save_trajectory_figure(trajectory: LoopTrajectory, output_dir) -> list[str]:
    """Write the loop trajectory figure (Q and mixing ratio per round,
    edges added as bars); returns the written file names."""
    rounds = [r.round_index for r in trajectory.records]
    qs = [r.q for r in trajectory.records]
    mixing = [r.mixing_ratio for r in trajectory.records]
    added = [r.edges_added for r in trajectory.records]

    fig, (ax_top, ax_bot) = plt.subplots(2, 1, figsize=(7, 5.5), sharex=True)
    ax_top.plot(rounds, qs, marker="o", color="#4363d8", label="Q")
    ax_top.plot(rounds, mixing, marker="s", color="#e6194b", label="mixing ratio")
    ax_top.set_ylabel("value")
    ax_top.legend()
    ax_top.set_title("Feedback-loop trajectory")
    ax_bot.bar(rounds, added, color="#911eb4")
    ax_bot.set_ylabel("edges added")
    ax_bot.set_xlabel("round")
    fig.tight_layout()
    path = output_dir / "trajectory.png"
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return [path.name]
