"""Matplotlib renderings of report data.

Every figure here can be rebuilt from the delimited exports (bin edges plus
counts); these helpers exist so the CLI can drop ready-made PNGs next to the
CSV/JSON when asked. All functions return the list of paths written.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.colors import LogNorm

from .agreement import AgreementReport
from .analysis import DistributionReport, Histogram
from .stats import BootstrapResult


def _bar(ax, hist: Histogram, color="#4878a8", label=None):
    lefts = hist.bin_edges[:-1]
    ax.bar(lefts, hist.counts, width=hist.bin_width, align="edge",
           color=color, edgecolor="white", linewidth=0.3, label=label)
    ax.set_ylabel("queries" if "caption" in hist.name or "positives" in hist.name else "count")


def save_distribution_figures(report: DistributionReport, out_dir, stem: str) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(6, 4))
    _bar(ax, report.positives_per_query)
    ax.set_xlabel("known positives per query")
    ax.set_title("Positives per query")
    path = out_dir / f"{stem}.positives_per_query.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    if report.positive_rank:
        n_runs = len(report.positive_rank)
        fig, axes = plt.subplots(1, n_runs, figsize=(5 * n_runs, 4), squeeze=False)
        for ax, (run, by_src) in zip(axes[0], sorted(report.positive_rank.items())):
            for src, color in (("original", "#c05040"), ("pooled", "#4878a8")):
                hist = by_src.get(src)
                if hist and hist.population:
                    ax.bar(
                        hist.bin_edges[:-1], hist.counts, width=1, align="edge",
                        alpha=0.6, label=src, color=color,
                    )
            ax.set_title(f"Positive ranks: {run}")
            ax.set_xlabel("rank")
            ax.set_ylabel("positives")
            ax.legend()
        path = out_dir / f"{stem}.positive_rank.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    _bar(ax1, report.caption_words)
    ax1.set_xlabel("caption length (words)")
    _bar(ax2, report.caption_chars, color="#60a060")
    ax2.set_xlabel("caption length (characters)")
    fig.suptitle("Caption lengths")
    path = out_dir / f"{stem}.caption_length.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)

    joint = report.joint
    fig, ax = plt.subplots(figsize=(6, 5))
    counts = [list(row) for row in joint.counts]
    vmax = max((max(row) for row in counts), default=1) or 1
    mesh = ax.pcolormesh(
        joint.y_edges, joint.x_edges, counts,
        norm=LogNorm(vmin=1, vmax=vmax), cmap="viridis", shading="flat",
    )
    fig.colorbar(mesh, ax=ax, label="queries (log scale)")
    ax.set_xlabel("caption length (words)")
    ax.set_ylabel("known positives per query")
    ax.set_title("Positives vs caption length")
    path = out_dir / f"{stem}.joint_density.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written


def save_bootstrap_figure(results: list[BootstrapResult], path) -> list[Path]:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig, axes = plt.subplots(1, len(results), figsize=(4.5 * len(results), 3.6), squeeze=False)
    for ax, result in zip(axes[0], results):
        ax.hist(result.deviations, bins=40, color="#4878a8", edgecolor="white", linewidth=0.3)
        ax.axvline(result.percentile_95, color="#c05040", linestyle="--",
                   label=f"95th pct = {result.percentile_95:.4f}")
        ax.set_title(f"N = {result.sample_size}")
        ax.set_xlabel("|resample mean - full mean|")
        ax.set_ylabel("resamples")
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [path]


def save_agreement_figure(report: AgreementReport, path) -> list[Path]:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    counts = sorted(report.by_label_count)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    ax1.bar(counts, [report.by_label_count[c].n_pairs for c in counts], color="#4878a8")
    ax1.set_xlabel("labels per pair")
    ax1.set_ylabel("pairs")
    ax2.bar(counts, [report.by_label_count[c].agreement_rate for c in counts], color="#60a060")
    ax2.set_xlabel("labels per pair")
    ax2.set_ylabel("agreement rate")
    ax2.set_ylim(0, 1.05)
    fig.suptitle("Agreement by label count")
    fig.tight_layout()
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [path]


def save_textsim_figure(rows, path) -> list[Path]:
    """Scatter of similarity profile against word length.

    ``rows`` are (similarity, word_len) tuples, e.g. from the profile CSV.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sims = [r[0] for r in rows]
    lens = [r[1] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(lens, sims, s=14, alpha=0.6, color="#4878a8")
    ax.set_xlabel("caption length (words)")
    ax.set_ylabel("mean top-k train similarity")
    ax.set_title("Train-test similarity vs caption length")
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return [path]
