"""Matplotlib rendering of experiment results to image files.

All figures use the Agg backend so report runs work headless; styling is
kept plain so the CSVs remain the primary artifact.
"""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_DPI = 150


def render_sweep(sweep, path: str | Path) -> None:
    """Average intervention count (and benefit) against the resistance penalty."""
    lams = [p.lam for p in sweep.points]
    counts = [p.avg_count for p in sweep.points]
    benefits = [p.avg_benefit for p in sweep.points]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(lams, counts, "o-", color="tab:blue", label="avg interventions")
    ax.set_xlabel(r"resistance penalty $\lambda$")
    ax.set_ylabel("average interventions", color="tab:blue")
    ax.tick_params(axis="y", labelcolor="tab:blue")

    ax2 = ax.twinx()
    ax2.plot(lams, benefits, "s--", color="tab:orange", label="avg benefit")
    ax2.set_ylabel("average benefit", color="tab:orange")
    ax2.tick_params(axis="y", labelcolor="tab:orange")

    ax.set_title("Sensitivity of recommendations to resistance")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_pareto(pareto, path: str | Path) -> None:
    """Benefit/count trade-off curve."""
    ks = [p.k for p in pareto.points]
    benefits = [p.avg_benefit for p in pareto.points]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, benefits, "o-", color="tab:green")
    ax.set_xlabel("intervention count cap k")
    ax.set_ylabel("average expected benefit")
    ax.set_title("Benefit vs. intervention count")
    ax.set_xticks(ks)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_attribution(weights: dict[str, float], path: str | Path, title: str = "Mean |attribution| by feature") -> None:
    """Horizontal bar chart of aggregated attribution magnitudes."""
    items = sorted(weights.items(), key=lambda kv: kv[1])
    names = [k for k, _ in items]
    values = [v for _, v in items]

    fig, ax = plt.subplots(figsize=(7, 0.35 * max(8, len(names))))
    ax.barh(range(len(names)), values, color="tab:purple")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xlabel("mean absolute attribution")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
