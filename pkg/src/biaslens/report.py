"""Report assembly: complementary-form conversions, row-max normalization,
dataset ordering and deterministic serialization.

All machine outputs are byte-stable: fixed 6-decimal numbers, sorted JSON
keys, undefined cells rendered as null-with-reason (JSON) or NA(reason)
(CSV/Markdown).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from . import representational as rep
from .agreement import AgreementMatrix
from .core import DIVERSITY, ContingencyTable
from .local_bias import LocalBiasMatrix
from .stereotypical import BiasStrength

FORMATS = ("json", "csv", "md")

#: strength band -> grid annotation mark
STRENGTH_MARKS = {"negligible": "", "weak": "°", "medium": "△", "strong": "▲"}

_CONVERSIONS = {
    rep.SIMPSON: "complement",
    rep.NORMALIZED_STD: "complement",
    rep.BERGER_PARKER: "complement",
    rep.SHANNON_EVENNESS: "complement",
    "imbalance_ratio": "reciprocal",
    rep.EFFECTIVE_SPECIES: "vocab_gap",
}

_IDENTITY_METRICS = {
    rep.RICHNESS,
    rep.SHANNON_ENTROPY,
    rep.INV_IMBALANCE,
    rep.SIMPSON_DIVERSITY,
    rep.SIMPSON_RECIPROCAL,
    "chi_squared",
    "cramers_v",
    "tschuprow_t",
    "pearson_contingency",
    "theil_u",
    "theil_u_reverse",
    "nmi",
    "npmi",
    "duchers_z",
}


def to_bias_form(metric_id: str, value: float, vocab_size: int | None = None) -> float:
    """The complementary/converted form of a metric value.

    Bias-directed representational metrics flip to their 1-x complement,
    the imbalance ratio inverts, and the effective-species count turns into
    the number of effectively unrepresented groups (vocabulary size minus
    value). Association metrics pass through unchanged.
    """
    kind = _CONVERSIONS.get(metric_id)
    if kind == "complement":
        return 1.0 - value
    if kind == "reciprocal":
        return 1.0 / value
    if kind == "vocab_gap":
        if vocab_size is None:
            raise ValueError(f"{metric_id}: conversion needs the vocabulary size")
        return float(vocab_size) - value
    if metric_id in _IDENTITY_METRICS:
        return value
    raise ValueError(f"unknown metric id {metric_id!r}")


#: metric ids whose grid row uses the complement in the diversity view
DIVERSITY_VIEW_CONVERTED = (rep.SIMPSON, rep.NORMALIZED_STD, rep.BERGER_PARKER)


@dataclass(frozen=True)
class ReportGrid:
    """A (metric, component) x dataset grid of metric values.

    orientation states which way is "better on the left": diversity grids
    rank datasets by descending normalized mean, bias grids ascending.
    """

    orientation: str
    rows: tuple[tuple[str, str], ...]
    datasets: tuple[str, ...]
    raw: tuple[tuple[float | None, ...], ...]
    reasons: tuple[tuple[str | None, ...], ...]
    normalized: tuple[tuple[float | None, ...], ...] | None = None
    row_flags: tuple[str, ...] = ()
    annotations: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self) -> None:
        expected = (len(self.rows), len(self.datasets))
        for name, matrix in (("raw", self.raw), ("reasons", self.reasons)):
            if len(matrix) != expected[0] or any(len(r) != expected[1] for r in matrix):
                raise ValueError(f"{name} does not match grid shape")

    def column(self, dataset: str, normalized: bool = False) -> list[float | None]:
        matrix = self.normalized if normalized else self.raw
        if matrix is None:
            raise ValueError("grid is not normalized yet")
        j = self.datasets.index(dataset)
        return [row[j] for row in matrix]


def build_grid(
    orientation: str,
    rows: Sequence[tuple[str, str]],
    datasets: Sequence[str],
    values: Mapping[tuple[str, str, str], float | None],
    reasons: Mapping[tuple[str, str, str], str] | None = None,
) -> ReportGrid:
    """Assemble a grid from (metric, component, dataset) -> value mappings."""
    reasons = reasons or {}
    raw = []
    why = []
    for metric_id, component in rows:
        raw.append(
            tuple(values.get((metric_id, component, ds)) for ds in datasets)
        )
        why.append(
            tuple(reasons.get((metric_id, component, ds)) for ds in datasets)
        )
    return ReportGrid(
        orientation=orientation,
        rows=tuple(tuple(r) for r in rows),
        datasets=tuple(datasets),
        raw=tuple(raw),
        reasons=tuple(why),
    )


def normalize_rows(grid: ReportGrid) -> ReportGrid:
    """Divide each row by its max over defined cells; undefined cells stay
    undefined, and rows whose max is not positive are flagged instead of
    normalized."""
    normalized = []
    flags = []
    for row in grid.raw:
        defined = [v for v in row if v is not None]
        if not defined:
            normalized.append(tuple(None for _ in row))
            flags.append("all-undefined")
            continue
        peak = max(defined)
        if peak <= 0.0:
            normalized.append(tuple(None for _ in row))
            flags.append("zero-max")
            continue
        normalized.append(
            tuple(None if v is None else v / peak for v in row)
        )
        flags.append("")
    return replace(grid, normalized=tuple(normalized), row_flags=tuple(flags))


def rank_entities(grid: ReportGrid) -> tuple[str, ...]:
    """Datasets ordered by the mean of their defined normalized cells.

    Diversity grids sort descending (most diverse first), bias grids
    ascending (least biased first). Ties break alphabetically; datasets
    with no defined cell go last.
    """
    if grid.normalized is None:
        raise ValueError("normalize the grid before ranking")
    scored = []
    empty = []
    for j, ds in enumerate(grid.datasets):
        cells = [row[j] for row in grid.normalized if row[j] is not None]
        if not cells:
            empty.append(ds)
            continue
        mean = math.fsum(cells) / len(cells)
        key = -mean if grid.orientation == DIVERSITY else mean
        scored.append((key, ds))
    ordered = [ds for _, ds in sorted(scored)]
    return tuple(ordered + sorted(empty))


def reorder(grid: ReportGrid, order: Sequence[str]) -> ReportGrid:
    """Grid with dataset columns permuted into the given order."""
    if sorted(order) != sorted(grid.datasets):
        raise ValueError("order must be a permutation of the grid datasets")
    index = [grid.datasets.index(ds) for ds in order]

    def permute(matrix):
        return tuple(tuple(row[j] for j in index) for row in matrix)

    return replace(
        grid,
        datasets=tuple(order),
        raw=permute(grid.raw),
        reasons=permute(grid.reasons),
        normalized=None if grid.normalized is None else permute(grid.normalized),
        annotations=() if not grid.annotations else permute(grid.annotations),
    )


def annotate_strength(
    grid: ReportGrid,
    strengths: Mapping[tuple[str, str], BiasStrength],
    metric_id: str = "cramers_v",
) -> ReportGrid:
    """Attach effect-size marks to the rows of one association metric.

    strengths maps (component, dataset) to a classified band; weak cells
    get a degree mark, medium a triangle, strong a filled triangle.
    """
    annotations = []
    for (row_metric, component), row in zip(grid.rows, grid.raw):
        marks = []
        for ds, value in zip(grid.datasets, row):
            strength = strengths.get((component, ds))
            if row_metric != metric_id or value is None or strength is None:
                marks.append("")
            else:
                marks.append(STRENGTH_MARKS[strength.band])
        annotations.append(tuple(marks))
    return replace(grid, annotations=tuple(annotations))


def _fmt(value: float | None, reason: str | None) -> str:
    if value is None:
        return f"NA({reason or 'undefined'})"
    return f"{value:.6f}"


def cell_json(value: float | None, reason: str | None) -> dict:
    if value is None:
        return {"value": None, "reason": reason or "undefined"}
    return {"value": round(value, 6)}


def grid_payload(grid: ReportGrid) -> dict:
    rows = []
    for i, (metric_id, component) in enumerate(grid.rows):
        cells = [
            cell_json(grid.raw[i][j], grid.reasons[i][j])
            for j in range(len(grid.datasets))
        ]
        if grid.normalized is not None:
            for j, cell in enumerate(cells):
                norm = grid.normalized[i][j]
                if norm is not None:
                    cell["normalized"] = round(norm, 6)
        if grid.annotations:
            for j, cell in enumerate(cells):
                if grid.annotations[i][j]:
                    cell["mark"] = grid.annotations[i][j]
        rows.append(
            {
                "metric": metric_id,
                "component": component,
                "flag": grid.row_flags[i] if grid.row_flags else "",
                "cells": cells,
            }
        )
    return {
        "orientation": grid.orientation,
        "datasets": list(grid.datasets),
        "rows": rows,
    }


def agreement_payload(matrix: AgreementMatrix) -> dict:
    pairs = []
    for (a, b), rhos in sorted(matrix.per_component.items()):
        pairs.append(
            {
                "metrics": [a, b],
                "per_component": {c: round(r, 6) for c, r in sorted(rhos.items())},
            }
        )
    return {
        "metrics": list(matrix.metrics),
        "mean": [
            [None if v is None else round(v, 6) for v in row] for row in matrix.cells
        ],
        "pairs": pairs,
        "excluded_values": matrix.excluded,
    }


def matrix_payload(matrix: LocalBiasMatrix) -> dict:
    return {
        "metric": matrix.metric_id,
        "groups": list(matrix.groups),
        "labels": list(matrix.labels),
        "cells": [
            [
                cell_json(matrix.values[i][j], matrix.reasons[i][j])
                for j in range(len(matrix.labels))
            ]
            for i in range(len(matrix.groups))
        ],
    }


def table_payload(table: ContingencyTable) -> dict:
    return {
        "component": table.component,
        "groups": list(table.groups),
        "labels": list(table.labels),
        "cells": [list(row) for row in table.cells],
        "n": table.n,
        "excluded": table.excluded,
    }


def csv_bytes(rows: Sequence[Sequence[str]]) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerows(rows)
    return buffer.getvalue().encode("utf-8")


def md_bytes(header: Sequence[str], rows: Sequence[Sequence[str]]) -> bytes:
    lines = ["| " + " | ".join(header) + " |"]
    lines.append("|" + "|".join(" --- " for _ in header) + "|")
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return ("\n".join(lines) + "\n").encode("utf-8")


def emit(obj, fmt: str) -> bytes:
    """Deterministic serialization of a grid, matrix, agreement result or
    contingency table. Same input, same bytes."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}")
    if fmt == "json":
        if isinstance(obj, ReportGrid):
            payload = grid_payload(obj)
        elif isinstance(obj, AgreementMatrix):
            payload = agreement_payload(obj)
        elif isinstance(obj, LocalBiasMatrix):
            payload = matrix_payload(obj)
        elif isinstance(obj, ContingencyTable):
            payload = table_payload(obj)
        else:
            payload = obj
        return (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")

    if isinstance(obj, ReportGrid):
        header = ["metric", "component", *obj.datasets]
        rows = []
        for i, (metric_id, component) in enumerate(obj.rows):
            cells = []
            for j in range(len(obj.datasets)):
                text = _fmt(obj.raw[i][j], obj.reasons[i][j])
                if obj.annotations and obj.annotations[i][j]:
                    text += obj.annotations[i][j]
                cells.append(text)
            rows.append([metric_id, component, *cells])
    elif isinstance(obj, AgreementMatrix):
        header = ["metric", *obj.metrics]
        rows = [
            [m, *(_fmt(v, None) if v is not None else "NA(no-valid-component)" for v in row)]
            for m, row in zip(obj.metrics, obj.cells)
        ]
    elif isinstance(obj, LocalBiasMatrix):
        header = ["group", *obj.labels]
        rows = [
            [
                g,
                *(
                    _fmt(obj.values[i][j], obj.reasons[i][j])
                    for j in range(len(obj.labels))
                ),
            ]
            for i, g in enumerate(obj.groups)
        ]
    elif isinstance(obj, ContingencyTable):
        header = ["group", *obj.labels]
        rows = [
            [g, *(str(c) for c in row)] for g, row in zip(obj.groups, obj.cells)
        ]
    else:
        raise TypeError(f"cannot emit {type(obj).__name__}")

    if fmt == "csv":
        return csv_bytes([header, *rows])
    return md_bytes(header, rows)


def emit_heatmap_svg(obj) -> bytes:
    """Standalone SVG heatmap; see :mod:`biaslens.figures`."""
    from .figures import render_heatmap_svg

    return render_heatmap_svg(obj)
