"""Rank agreement between metrics: Spearman rho per component, averaged.

Undefined metric values are pairwise-excluded per component before
correlating, and the number of exclusions is reported so sparse inputs are
visible in the output rather than silently absorbed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .core import BOUNDS_TOL, ValidationError
from .local_bias import LocalBiasMatrix

#: component -> metric id -> dataset -> value (None when undefined)
ValuesByComponent = Mapping[str, Mapping[str, Mapping[str, float | None]]]


def rank_with_ties(values: Sequence[float]) -> list[float]:
    """Fractional (average) ranks, 1-based; ties share their mean rank."""
    if len(values) == 0:
        raise ValueError("cannot rank an empty sequence")
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"cannot rank non-finite value {v}")
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j + 2) / 2.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Pearson correlation of fractional ranks; None when a side is constant.

    Identical and exactly complementary rankings short-circuit to +/-1 so
    monotone transforms of the same ordering correlate exactly.
    """
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 3:
        raise ValueError(f"need at least 3 paired values, got {len(xs)}")
    rx = rank_with_ties(xs)
    ry = rank_with_ties(ys)
    if min(rx) == max(rx) or min(ry) == max(ry):
        return None
    if rx == ry:
        return 1.0
    flip = len(rx) + 1.0
    if rx == [flip - r for r in ry]:
        return -1.0
    n = len(rx)
    mx = math.fsum(rx) / n
    my = math.fsum(ry) / n
    dx = [r - mx for r in rx]
    dy = [r - my for r in ry]
    sxx = math.fsum(d * d for d in dx)
    syy = math.fsum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    sxy = math.fsum(a * b for a, b in zip(dx, dy))
    return sxy / (math.sqrt(sxx) * math.sqrt(syy))


@dataclass(frozen=True)
class AgreementMatrix:
    """Mean Spearman rho per metric pair, with per-component provenance."""

    metrics: tuple[str, ...]
    cells: tuple[tuple[float | None, ...], ...]
    per_component: dict[tuple[str, str], dict[str, float]] = field(default_factory=dict)
    excluded: int = 0

    def __post_init__(self) -> None:
        k = len(self.metrics)
        if len(self.cells) != k or any(len(row) != k for row in self.cells):
            raise ValidationError("agreement matrix is not square")
        for i in range(k):
            if self.cells[i][i] != 1.0:
                raise ValidationError("diagonal must be exactly 1")
            for j in range(k):
                v = self.cells[i][j]
                if v != self.cells[j][i]:
                    raise ValidationError("agreement matrix must be symmetric")
                if v is not None and not (-1.0 - BOUNDS_TOL <= v <= 1.0 + BOUNDS_TOL):
                    raise ValidationError(f"rho {v} outside [-1, 1]")

    def cell(self, a: str, b: str) -> float | None:
        return self.cells[self.metrics.index(a)][self.metrics.index(b)]


def metric_agreement(
    values_by_component: ValuesByComponent, min_datasets: int = 3
) -> AgreementMatrix:
    """Pairwise Spearman rho over datasets, averaged across components.

    For each metric pair and component, rho is computed over the datasets
    where both metrics are defined; components left with fewer than
    ``min_datasets`` usable datasets (or a constant ranking) are skipped.
    The unweighted mean across surviving components fills the cell; pairs
    with no surviving component stay undefined.
    """
    components = list(values_by_component.keys())
    if not components:
        raise ValueError("no components supplied")
    metrics: list[str] = []
    datasets: set[str] = set()
    for per_metric in values_by_component.values():
        for metric_id, per_dataset in per_metric.items():
            if metric_id not in metrics:
                metrics.append(metric_id)
            datasets.update(per_dataset.keys())
    if len(metrics) < 2:
        raise ValueError("need at least 2 metrics")
    if len(datasets) < min_datasets:
        raise ValueError(
            f"need at least {min_datasets} datasets, got {len(datasets)}"
        )

    k = len(metrics)
    cells: list[list[float | None]] = [[None] * k for _ in range(k)]
    per_component: dict[tuple[str, str], dict[str, float]] = {}
    excluded = 0
    for i in range(k):
        cells[i][i] = 1.0
    for i in range(k):
        for j in range(i + 1, k):
            rhos: dict[str, float] = {}
            for component in components:
                per_metric = values_by_component[component]
                a = per_metric.get(metrics[i], {})
                b = per_metric.get(metrics[j], {})
                common = sorted(set(a) & set(b))
                xs, ys = [], []
                for ds in common:
                    va, vb = a[ds], b[ds]
                    if va is None or vb is None:
                        excluded += 1
                        continue
                    xs.append(va)
                    ys.append(vb)
                if len(xs) < min_datasets:
                    continue
                rho = spearman_rho(xs, ys)
                if rho is None:
                    continue
                rhos[component] = rho
            if rhos:
                mean = math.fsum(rhos.values()) / len(rhos)
                cells[i][j] = cells[j][i] = mean
                per_component[(metrics[i], metrics[j])] = rhos
    return AgreementMatrix(
        metrics=tuple(metrics),
        cells=tuple(tuple(row) for row in cells),
        per_component=per_component,
        excluded=excluded,
    )


def local_agreement(npmi: LocalBiasMatrix, z: LocalBiasMatrix) -> float | None:
    """Spearman rho between the jointly-defined cells of two local matrices."""
    if npmi.groups != z.groups or npmi.labels != z.labels:
        raise ValueError("matrix dimensions do not match")
    xs, ys = [], []
    for i in range(len(npmi.groups)):
        for j in range(len(npmi.labels)):
            a = npmi.values[i][j]
            b = z.values[i][j]
            if a is not None and b is not None:
                xs.append(a)
                ys.append(b)
    if len(xs) < 3:
        return None
    return spearman_rho(xs, ys)
