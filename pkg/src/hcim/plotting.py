"""Figures written next to the CSV reports (``--figures``)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# Fixed metadata keeps PNG bytes stable across runs.
_META = {"Software": None}


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata=_META)
    plt.close(fig)
    return path


def plot_comparison(rows: list[dict], reference: str, path: Path) -> Path:
    """Grouped bars of normalized energy and latency*area per workload and mode."""
    workloads = list(dict.fromkeys(r["workload"] for r in rows))
    modes = list(dict.fromkeys(r["mode"] for r in rows))
    lookup = {(r["workload"], r["mode"]): r for r in rows}
    fig, axes = plt.subplots(1, 2, figsize=(11, 3.8))
    width = 0.8 / max(len(modes), 1)
    x = np.arange(len(workloads))
    for ax, key, label in zip(axes, ("norm_energy", "norm_latency_area"), ("Energy", "Latency*Area")):
        for i, m in enumerate(modes):
            vals = [float(lookup[w, m][key]) if (w, m) in lookup else np.nan for w in workloads]
            ax.bar(x + (i - (len(modes) - 1) / 2) * width, vals, width, label=m)
        ax.set_xticks(x)
        ax.set_xticklabels(workloads, rotation=30, ha="right")
        ax.set_yscale("log")
        ax.set_ylabel(f"{label} (norm. to {reference})")
        ax.axhline(1.0, color="k", lw=0.6)
    axes[0].legend(fontsize=8, frameon=False)
    return _save(fig, path)


def plot_sweep(rows: list[dict], axis: str, y: str, path: Path, ylabel: str | None = None) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for w in dict.fromkeys(r["workload"] for r in rows):
        pts = [(float(r[axis]), float(r[y])) for r in rows if r["workload"] == w]
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker="o", label=w)
    ax.set_xlabel(axis)
    ax.set_ylabel(ylabel or y)
    ax.legend(fontsize=8, frameon=False)
    ax.grid(alpha=0.3)
    return _save(fig, path)
