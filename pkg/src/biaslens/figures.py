"""Heatmap figures rendered to standalone SVG bytes.

Rendering is byte-deterministic: a fixed hash salt, no creation date
metadata, and text kept as text elements. Local bias matrices use a
diverging scale anchored at -1/0/+1; normalized grids and support tables
use a sequential scale. Undefined cells are hatched.
"""

from __future__ import annotations

import io

import matplotlib
from matplotlib.figure import Figure
from matplotlib.patches import Rectangle

from .core import ContingencyTable
from .local_bias import LocalBiasMatrix
from .report import ReportGrid

_HASHSALT = "biaslens"
_DIVERGING = "RdBu_r"
_SEQUENTIAL = "Blues"
_UNDEFINED_FACE = "0.88"


def _text_color(rgba) -> str:
    r, g, b = rgba[:3]
    luminance = 0.299 * r + 0.587 * g + 0.114 * b
    return "white" if luminance < 0.45 else "#202020"


def _render(
    row_labels,
    col_labels,
    colors,  # 2D list of rgba or None for undefined
    labels,  # 2D list of str ("" for no label)
    title: str,
) -> bytes:
    nrows, ncols = len(row_labels), len(col_labels)
    width = max(2.4, 0.62 * ncols + 1.8)
    height = max(1.9, 0.5 * nrows + 1.4)
    with matplotlib.rc_context(
        {"svg.hashsalt": _HASHSALT, "svg.fonttype": "none", "font.size": 9}
    ):
        fig = Figure(figsize=(width, height))
        ax = fig.add_subplot()
        for i in range(nrows):
            for j in range(ncols):
                rgba = colors[i][j]
                if rgba is None:
                    patch = Rectangle(
                        (j, i), 1, 1,
                        facecolor=_UNDEFINED_FACE,
                        hatch="////",
                        edgecolor="white",
                        linewidth=0.8,
                    )
                    ax.add_patch(patch)
                    continue
                ax.add_patch(
                    Rectangle((j, i), 1, 1, facecolor=rgba, edgecolor="white", linewidth=0.8)
                )
                if labels[i][j]:
                    ax.text(
                        j + 0.5, i + 0.5, labels[i][j],
                        ha="center", va="center",
                        color=_text_color(rgba), fontsize=8,
                    )
        ax.set_xlim(0, ncols)
        ax.set_ylim(nrows, 0)
        ax.set_xticks([j + 0.5 for j in range(ncols)])
        ax.set_xticklabels(col_labels, rotation=45, ha="right")
        ax.set_yticks([i + 0.5 for i in range(nrows)])
        ax.set_yticklabels(row_labels)
        ax.tick_params(length=0)
        for spine in ax.spines.values():
            spine.set_visible(False)
        ax.set_title(title)
        buffer = io.BytesIO()
        fig.savefig(
            buffer, format="svg", bbox_inches="tight", metadata={"Date": None}
        )
    return buffer.getvalue()


def render_heatmap_svg(obj) -> bytes:
    """SVG heatmap for a local bias matrix, a normalized report grid, or a
    contingency table (support counts)."""
    if isinstance(obj, LocalBiasMatrix):
        cmap = matplotlib.colormaps[_DIVERGING]
        colors = [
            [
                None if v is None else cmap((v + 1.0) / 2.0)
                for v in row
            ]
            for row in obj.values
        ]
        labels = [
            ["" if v is None else f"{v:.2f}" for v in row] for row in obj.values
        ]
        return _render(obj.groups, obj.labels, colors, labels, obj.metric_id)

    if isinstance(obj, ContingencyTable):
        cmap = matplotlib.colormaps[_SEQUENTIAL]
        peak = max(max(row) for row in obj.cells)
        scale = float(peak) if peak > 0 else 1.0
        colors = [[cmap(c / scale) for c in row] for row in obj.cells]
        labels = [[str(c) for c in row] for row in obj.cells]
        title = f"support ({obj.component})" if obj.component else "support"
        return _render(obj.groups, obj.labels, colors, labels, title)

    if isinstance(obj, ReportGrid):
        if obj.normalized is None:
            raise ValueError("normalize the grid before rendering")
        cmap = matplotlib.colormaps[_SEQUENTIAL]
        colors = [
            [None if v is None else cmap(v) for v in row] for row in obj.normalized
        ]
        labels = [
            ["" if v is None else f"{v:.2f}" for v in row] for row in obj.normalized
        ]
        if obj.annotations:
            for i, marks in enumerate(obj.annotations):
                for j, mark in enumerate(marks):
                    if mark and labels[i][j]:
                        labels[i][j] += mark
        row_labels = [f"{metric} [{component}]" for metric, component in obj.rows]
        return _render(
            row_labels, obj.datasets, colors, labels, f"{obj.orientation} grid"
        )

    raise TypeError(f"cannot render {type(obj).__name__}")
