"""Per-cell (group x class) stereotypical bias matrices.

Both metrics return a full-size matrix with per-cell undefined markers, so
one empty subgroup never hides the rest of the grid. Cells lying in a
zero-marginal row or column are undefined rather than extrapolated; an
empty cell with positive marginals is maximal underrepresentation for the
pointwise mutual information variant (-1) but stays finite for the
two-branch association score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .core import (
    BOUNDS_TOL,
    ZERO_DENOMINATOR,
    ZERO_MARGINAL,
    ContingencyTable,
    ValidationError,
)

NPMI = "npmi"
DUCHERS_Z = "duchers_z"


@dataclass(frozen=True)
class LocalBiasMatrix:
    """Matrix of local bias values in [-1, 1] with per-cell undefined reasons."""

    metric_id: str
    groups: tuple[str, ...]
    labels: tuple[str, ...]
    values: tuple[tuple[float | None, ...], ...]
    reasons: tuple[tuple[str | None, ...], ...]

    def __post_init__(self) -> None:
        if len(self.values) != len(self.groups) or len(self.reasons) != len(self.groups):
            raise ValidationError("matrix rows do not match groups")
        for vrow, rrow in zip(self.values, self.reasons):
            if len(vrow) != len(self.labels) or len(rrow) != len(self.labels):
                raise ValidationError("matrix columns do not match labels")
            for v, r in zip(vrow, rrow):
                if (v is None) == (r is None):
                    raise ValidationError("cell needs exactly one of value/reason")
                if v is not None and not (-1.0 - BOUNDS_TOL <= v <= 1.0 + BOUNDS_TOL):
                    raise ValidationError(f"cell value {v} outside [-1, 1]")

    def defined_cells(self) -> Iterator[tuple[int, int, float]]:
        """(row, col, value) for every defined cell, row-major."""
        for i, row in enumerate(self.values):
            for j, v in enumerate(row):
                if v is not None:
                    yield i, j, v


def _cell_proportions(table: ContingencyTable):
    n = table.n
    pg = [t / n for t in table.row_totals()]
    py = [t / n for t in table.col_totals()]
    return n, pg, py


def npmi_matrix(table: ContingencyTable) -> LocalBiasMatrix:
    """Normalized pointwise mutual information per cell.

    Empty cells under positive marginals score -1 (the metric's documented
    oversensitivity to missing subgroups is preserved, not smoothed away);
    a cell holding the whole population is undefined because the ln(p)
    normalizer vanishes.
    """
    n, pg, py = _cell_proportions(table)
    values: list[tuple[float | None, ...]] = []
    reasons: list[tuple[str | None, ...]] = []
    for i, row in enumerate(table.cells):
        vrow: list[float | None] = []
        rrow: list[str | None] = []
        for j, cell in enumerate(row):
            if pg[i] == 0.0 or py[j] == 0.0:
                vrow.append(None)
                rrow.append(ZERO_MARGINAL)
            elif cell == 0:
                vrow.append(-1.0)
                rrow.append(None)
            elif cell == n:
                vrow.append(None)
                rrow.append(ZERO_DENOMINATOR)
            else:
                p = cell / n
                value = -math.log(p / (pg[i] * py[j])) / math.log(p)
                vrow.append(value + 0.0)
                rrow.append(None)
        values.append(tuple(vrow))
        reasons.append(tuple(rrow))
    return LocalBiasMatrix(
        metric_id=NPMI,
        groups=table.groups,
        labels=table.labels,
        values=tuple(values),
        reasons=tuple(reasons),
    )


def duchers_z_matrix(table: ContingencyTable) -> LocalBiasMatrix:
    """Two-branch local association score per cell.

    Positive deviations are scaled by the largest possible positive
    deviation given the marginals, negative ones by the largest possible
    negative deviation, so +1/-1 mark the extremes actually reachable for
    that cell.
    """
    n, pg, py = _cell_proportions(table)
    values: list[tuple[float | None, ...]] = []
    reasons: list[tuple[str | None, ...]] = []
    for i, row in enumerate(table.cells):
        vrow: list[float | None] = []
        rrow: list[str | None] = []
        for j, cell in enumerate(row):
            if pg[i] == 0.0 or py[j] == 0.0:
                vrow.append(None)
                rrow.append(ZERO_MARGINAL)
                continue
            expected = pg[i] * py[j]
            num = cell / n - expected
            if num > 0.0:
                den = min(pg[i], py[j]) - expected
            elif num < 0.0:
                den = expected - max(0.0, pg[i] + py[j] - 1.0)
            else:
                vrow.append(0.0)
                rrow.append(None)
                continue
            if den == 0.0:
                vrow.append(None)
                rrow.append(ZERO_DENOMINATOR)
            else:
                vrow.append(num / den)
                rrow.append(None)
        values.append(tuple(vrow))
        reasons.append(tuple(rrow))
    return LocalBiasMatrix(
        metric_id=DUCHERS_Z,
        groups=table.groups,
        labels=table.labels,
        values=tuple(values),
        reasons=tuple(reasons),
    )
