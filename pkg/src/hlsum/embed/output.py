"""Writers for embedding CSV tables and static SVG scatter plots."""

from __future__ import annotations

import csv
import io
from html import escape
from typing import Sequence

import numpy as np

CSV_COLUMNS = ("id", "group", "x", "y", "is_centroid")

# Tableau-10, cycled when there are more groups.
PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)


def embedding_csv(ids: Sequence[str], groups: Sequence[str], points: np.ndarray, is_centroid: Sequence[bool]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rid, group, (x, y), cen in zip(ids, groups, points, is_centroid):
        writer.writerow([rid, group, repr(float(x)), repr(float(y)), int(bool(cen))])
    return buf.getvalue()


def scatter_svg(
    groups: Sequence[str],
    points: np.ndarray,
    is_centroid: Sequence[bool],
    title: str = "",
    width: int = 640,
    height: int = 480,
) -> str:
    """Self-contained SVG: one color per group, centroids drawn larger with an outline."""
    points = np.asarray(points, dtype=float)
    margin, legend_w = 24, 140
    plot_w = width - 2 * margin - legend_w
    plot_h = height - 2 * margin - (20 if title else 0)
    top = margin + (20 if title else 0)

    lo = points.min(axis=0)
    span = points.max(axis=0) - lo
    span[span == 0] = 1.0

    def px(p):
        x = margin + (p[0] - lo[0]) / span[0] * plot_w
        y = top + plot_h - (p[1] - lo[1]) / span[1] * plot_h
        return x, y

    order = list(dict.fromkeys(groups))
    color = {g: PALETTE[i % len(PALETTE)] for i, g in enumerate(order)}

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{margin}" y="{margin}" font-family="sans-serif" font-size="14">{escape(title)}</text>')
    # data points first so centroids sit on top
    for draw_centroids in (False, True):
        for g, p, cen in zip(groups, points, is_centroid):
            if bool(cen) != draw_centroids:
                continue
            x, y = px(p)
            if cen:
                out.append(
                    f'<circle class="centroid" cx="{x:.2f}" cy="{y:.2f}" r="8" fill="{color[g]}" '
                    f'stroke="black" stroke-width="1.5"><title>{escape(g)} centre</title></circle>'
                )
            else:
                out.append(f'<circle class="point" cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color[g]}" fill-opacity="0.7"/>')
    lx = width - margin - legend_w + 16
    for i, g in enumerate(order):
        ly = top + 14 + i * 18
        out.append(f'<circle cx="{lx}" cy="{ly - 4}" r="5" fill="{color[g]}"/>')
        out.append(f'<text x="{lx + 12}" y="{ly}" font-family="sans-serif" font-size="12">{escape(g)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
