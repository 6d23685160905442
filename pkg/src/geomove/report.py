"""Static report rendering: choropleth bin map and two-sided monthly chart
as PNG files, with the same aggregates written as CSV alongside."""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.collections import PolyCollection
from matplotlib.patches import Patch

from .analytics import BigramCount, PlacePair, TemporalBucket

# Sequential, color-blind-friendly ramps (ColorBrewer YlGnBu / Greens).
BIN_CMAP = "YlGnBu"
IMPAIRED_COLOR = "#7b3294"  # purple, left side
NORMAL_COLOR = "#008837"  # green, right side


def render_bin_map(
    bins: Sequence[dict],
    k: int,
    bounds: Sequence[float],
    path: str | Path,
    title: str = "statement counts by geo-bin",
) -> Path:
    """One filled polygon per bin, shaded by class index; legend lists the
    class bounds."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(10, 6))
    cmap = plt.get_cmap(BIN_CMAP, max(k, 2))
    polygons = []
    colors = []
    for b in bins:
        ring = b.get("geometry")
        if not ring:
            continue
        polygons.append([(pt[0], pt[1]) for pt in ring])
        colors.append(cmap(b["class_index"]))
    if polygons:
        ax.add_collection(
            PolyCollection(polygons, facecolors=colors, edgecolors="#555555", linewidths=0.4)
        )
        ax.autoscale_view()
    labels = _class_labels(k, bounds)
    handles = [Patch(facecolor=cmap(i), edgecolor="#555555", label=labels[i]) for i in range(k)]
    ax.legend(handles=handles, loc="lower left", fontsize=8, title="count")
    ax.set_xlabel("longitude")
    ax.set_ylabel("latitude")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _class_labels(k: int, bounds: Sequence[float]) -> list[str]:
    labels = []
    lo: Optional[float] = None
    for i in range(k):
        hi = bounds[i] if i < len(bounds) else None
        if lo is None and hi is not None:
            labels.append(f"<= {hi:g}")
        elif hi is not None:
            labels.append(f"{lo:g} - {hi:g}")
        elif lo is not None:
            labels.append(f"> {lo:g}")
        else:
            labels.append("all")
        lo = hi
    return labels


def render_timeline(
    buckets: Sequence[TemporalBucket],
    path: str | Path,
    title: str = "statements per month",
) -> Path:
    """Two-sided horizontal bar chart: impaired counts extend left in purple,
    normal counts extend right in green, oldest month at the top."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(7, max(2.5, 0.4 * len(buckets) + 1)))
    ys = range(len(buckets))
    ax.barh(ys, [-b.impaired_count for b in buckets], color=IMPAIRED_COLOR, label="impaired")
    ax.barh(ys, [b.normal_count for b in buckets], color=NORMAL_COLOR, label="normal")
    ax.set_yticks(list(ys))
    ax.set_yticklabels([b.month for b in buckets])
    ax.invert_yaxis()  # oldest month on top
    ax.axvline(0, color="#333333", linewidth=0.8)
    ax.set_xlabel("impaired  |  normal")
    ax.set_title(title)
    ax.legend(loc="lower right", fontsize=8)
    ticks = ax.get_xticks()
    ax.set_xticks(ticks)
    ax.set_xticklabels([f"{abs(t):g}" for t in ticks])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


# ---------------------------------------------------------------------------
# Delimited output

def write_bins_csv(bins: Sequence[dict], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_id", "count", "class_index", "centroid_lon", "centroid_lat"])
        for b in bins:
            centroid = b.get("centroid") or ("", "")
            writer.writerow([b["bin_id"], b["count"], b["class_index"], centroid[0], centroid[1]])
    return path


def write_timeline_csv(buckets: Sequence[TemporalBucket], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["month", "normal", "impaired"])
        for b in buckets:
            writer.writerow([b.month, b.normal_count, b.impaired_count])
    return path


def write_bigrams_csv(bigrams: Sequence[BigramCount], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["token_1", "token_2", "count"])
        for b in bigrams:
            writer.writerow([b.bigram[0], b.bigram[1], b.count])
    return path


def write_connections_csv(pairs: Sequence[PlacePair], path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["a", "b", "weight"])
        for p in pairs:
            writer.writerow([p.a, p.b, p.weight])
    return path
