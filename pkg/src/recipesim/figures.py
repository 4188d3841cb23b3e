"""Figure rendering for the analyze report path.

Renders alongside the delimited reports: per-metric score densities, the
metric correlation heatmap, the two-semantic-model scatter, and mean view
scores per ingredient-overlap bin. All figures go through the Agg backend
so rendering works headless.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .analysis import CORE_METRICS, correlation_matrix, jaccard_bin_agreement
from .fusion import ScoreTable


def _gaussian_kde(data: np.ndarray, grid: np.ndarray) -> np.ndarray:
    # Silverman bandwidth; falls back to a small constant for near-constant data.
    n = len(data)
    sigma = data.std(ddof=1) if n > 1 else 0.0
    bandwidth = 1.06 * sigma * n ** (-1 / 5) if sigma > 0 else 0.01
    diffs = (grid[:, None] - data[None, :]) / bandwidth
    return np.exp(-0.5 * diffs**2).sum(axis=1) / (n * bandwidth * np.sqrt(2 * np.pi))


def render_distributions(table: ScoreTable, path: str) -> None:
    grid = np.linspace(0.0, 1.0, 256)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for metric in CORE_METRICS:
        data = np.asarray(table.column(metric))
        ax.plot(grid, _gaussian_kde(data, grid), label=metric, linewidth=1.4)
    ax.set_xlabel("similarity score")
    ax.set_ylabel("density")
    ax.set_xlim(0, 1)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_correlation_heatmap(table: ScoreTable, path: str) -> None:
    matrix = correlation_matrix(table)
    values = np.array(
        [[np.nan if v is None else v for v in row] for row in matrix], dtype=float
    )
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    image = ax.imshow(values, vmin=-1.0, vmax=1.0, cmap="RdBu_r")
    ax.set_xticks(range(len(CORE_METRICS)), CORE_METRICS, rotation=45, ha="right", fontsize=8)
    ax.set_yticks(range(len(CORE_METRICS)), CORE_METRICS, fontsize=8)
    for i in range(len(CORE_METRICS)):
        for j in range(len(CORE_METRICS)):
            text = "n/a" if np.isnan(values[i, j]) else f"{values[i, j]:.2f}"
            ax.text(j, i, text, ha="center", va="center", fontsize=8)
    fig.colorbar(image, ax=ax, shrink=0.85)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_semantic_scatter(table: ScoreTable, path: str) -> None:
    a = np.asarray(table.column("sem_a"))
    b = np.asarray(table.column("sem_b"))
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(a, b, s=8, alpha=0.4, edgecolors="none")
    ax.plot([0, 1], [0, 1], color="gray", linewidth=0.8, linestyle="--")
    ax.set_xlabel("sem_a")
    ax.set_ylabel("sem_b")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_bin_trends(table: ScoreTable, path: str) -> None:
    rows = jaccard_bin_agreement(table)
    centers = [(r.bin_lower + r.bin_upper) / 2 for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for label, getter in (
        ("avg semantic", lambda r: r.avg_semantic),
        ("avg nutritional", lambda r: r.avg_nutritional),
        ("avg fused", lambda r: r.avg_fused),
    ):
        xs = [c for c, r in zip(centers, rows) if getter(r) is not None]
        ys = [getter(r) for r in rows if getter(r) is not None]
        ax.plot(xs, ys, marker="o", markersize=4, label=label)
    ax.set_xlabel("ingredient-overlap bin")
    ax.set_ylabel("mean score")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


FIGURE_RENDERERS = {
    "distributions.png": render_distributions,
    "correlation.png": render_correlation_heatmap,
    "model_scatter.png": render_semantic_scatter,
    "bin_trends.png": render_bin_trends,
}


def render_all(table: ScoreTable, out_dir: str) -> list[str]:
    paths = []
    for filename, renderer in FIGURE_RENDERERS.items():
        path = os.path.join(out_dir, filename)
        renderer(table, path)
        paths.append(path)
    return paths
