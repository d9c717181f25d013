"""Global stereotypical bias metrics over a group x class contingency table.

Zero-marginal rows/columns are dropped before computing (an expected count
of zero would divide by zero); the dropped names travel with the result as
notes. The chi-squared family is evaluated in proportion space, which makes
the normalized variants bit-identical under count scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    ASSOCIATION,
    SINGLE_GROUP,
    ZERO_DENOMINATOR,
    ContingencyTable,
    MetricValue,
    ValidationError,
    entropy,
)

CHI_SQUARED = "chi_squared"
CRAMERS_V = "cramers_v"
TSCHUPROW_T = "tschuprow_t"
PEARSON_C = "pearson_contingency"
THEIL_U = "theil_u"
THEIL_U_REVERSE = "theil_u_reverse"
NMI = "nmi"

#: Canonical computation order for reports (bounded metrics only).
ALL_METRICS = (CRAMERS_V, TSCHUPROW_T, PEARSON_C, THEIL_U, THEIL_U_REVERSE, NMI)

GROUPS = "groups"
LABELS = "labels"

COHEN = "cohen"
LITERAL = "literal"
THRESHOLD_MODES = (COHEN, LITERAL)
_BASE_THRESHOLDS = (0.1, 0.3, 0.5)

NEGLIGIBLE = "negligible"
WEAK = "weak"
MEDIUM = "medium"
STRONG = "strong"


@dataclass(frozen=True)
class BiasStrength:
    """Effect-size band for an association value at a given DoF."""

    band: str
    dof: int
    thresholds: tuple[float, float, float]

    def __post_init__(self) -> None:
        t1, t2, t3 = self.thresholds
        if not (t1 < t2 < t3):
            raise ValidationError("thresholds must be strictly increasing")


def _drop_notes(dropped_g: tuple[str, ...], dropped_y: tuple[str, ...]) -> tuple[str, ...]:
    notes = []
    if dropped_g:
        notes.append("dropped-groups:" + ",".join(dropped_g))
    if dropped_y:
        notes.append("dropped-labels:" + ",".join(dropped_y))
    return tuple(notes)


def _phi2(table: ContingencyTable) -> float:
    """chi-squared / n, computed from joint and marginal proportions."""
    n = table.n
    pg = [t / n for t in table.row_totals()]
    py = [t / n for t in table.col_totals()]
    return math.fsum(
        (table.cells[i][j] / n - pg[i] * py[j]) ** 2 / (pg[i] * py[j])
        for i in range(len(table.groups))
        for j in range(len(table.labels))
    )


def _chi_family(table: ContingencyTable, metric_id: str) -> MetricValue:
    reduced, dropped_g, dropped_y = table.drop_unrepresented()
    notes = _drop_notes(dropped_g, dropped_y)
    r, c = len(reduced.groups), len(reduced.labels)
    if r < 2 or c < 2:
        bounds = (0.0, math.inf) if metric_id == CHI_SQUARED else (0.0, 1.0)
        return MetricValue(
            metric_id=metric_id,
            value=None,
            direction=ASSOCIATION,
            bounds=bounds,
            reason=SINGLE_GROUP,
            notes=notes,
        )
    phi2 = _phi2(reduced)
    if metric_id == CHI_SQUARED:
        value, bounds = reduced.n * phi2, (0.0, math.inf)
    elif metric_id == CRAMERS_V:
        value, bounds = math.sqrt(phi2 / min(r - 1, c - 1)), (0.0, 1.0)
    elif metric_id == TSCHUPROW_T:
        value, bounds = math.sqrt(phi2 / math.sqrt((r - 1) * (c - 1))), (0.0, 1.0)
    else:
        value, bounds = math.sqrt(phi2 / (1.0 + phi2)), (0.0, 1.0)
    return MetricValue(
        metric_id=metric_id,
        value=value,
        direction=ASSOCIATION,
        bounds=bounds,
        notes=notes,
    )


def chi_squared(table: ContingencyTable) -> MetricValue:
    """Pearson chi-squared statistic; sample-size dependent by design."""
    return _chi_family(table, CHI_SQUARED)


def cramers_v(table: ContingencyTable) -> MetricValue:
    return _chi_family(table, CRAMERS_V)


def tschuprow_t(table: ContingencyTable) -> MetricValue:
    return _chi_family(table, TSCHUPROW_T)


def pearson_contingency(table: ContingencyTable) -> MetricValue:
    """Pearson's contingency coefficient sqrt(phi2 / (1 + phi2)); strictly < 1."""
    return _chi_family(table, PEARSON_C)


def marginal_entropy(table: ContingencyTable, side: str) -> float:
    """Entropy of the row (side="groups") or column (side="labels") marginals."""
    totals = table.row_totals() if side == GROUPS else table.col_totals()
    return entropy(t / table.n for t in totals)


def conditional_entropy(table: ContingencyTable, given: str) -> float:
    """H(other side | given side), natural log, 0*ln(0)=0 convention."""
    n = table.n
    if given == LABELS:
        cond = table.col_totals()
        pairs = (
            (table.cells[i][j], cond[j])
            for i in range(len(table.groups))
            for j in range(len(table.labels))
        )
    else:
        cond = table.row_totals()
        pairs = (
            (table.cells[i][j], cond[i])
            for i in range(len(table.groups))
            for j in range(len(table.labels))
        )
    return -math.fsum(
        (cell / n) * math.log((cell / n) / (total / n))
        for cell, total in pairs
        if cell > 0
    )


def mutual_information(table: ContingencyTable) -> float:
    """Symmetric mutual information between groups and labels (nats)."""
    n = table.n
    pg = [t / n for t in table.row_totals()]
    py = [t / n for t in table.col_totals()]
    return math.fsum(
        (cell / n) * math.log((cell / n) / (pg[i] * py[j]))
        for i, row in enumerate(table.cells)
        for j, cell in enumerate(row)
        if cell > 0
    )


def theils_u(table: ContingencyTable, direction: str = "default") -> MetricValue:
    """Entropy-based association, normalized by the second variable's entropy.

    default: how much knowing the label reduces group uncertainty, scaled
    by the label entropy; reverse swaps the roles. The numerator is the
    (symmetric) mutual information, so the two directions differ only in
    their normalizer.
    """
    if direction not in ("default", "reverse"):
        raise ValueError(f"unknown direction {direction!r}")
    metric_id = THEIL_U if direction == "default" else THEIL_U_REVERSE
    reduced, dropped_g, dropped_y = table.drop_unrepresented()
    notes = _drop_notes(dropped_g, dropped_y)
    normalizer = marginal_entropy(reduced, LABELS if direction == "default" else GROUPS)
    if normalizer == 0.0:
        return MetricValue(
            metric_id=metric_id,
            value=None,
            direction=ASSOCIATION,
            bounds=(0.0, 1.0),
            reason=ZERO_DENOMINATOR,
            notes=notes,
        )
    return MetricValue(
        metric_id=metric_id,
        value=mutual_information(reduced) / normalizer,
        direction=ASSOCIATION,
        bounds=(0.0, 1.0),
        notes=notes,
    )


def normalized_mutual_information(table: ContingencyTable) -> MetricValue:
    """Mutual information normalized by the joint entropy."""
    reduced, dropped_g, dropped_y = table.drop_unrepresented()
    notes = _drop_notes(dropped_g, dropped_y)
    n = reduced.n
    joint = entropy(cell / n for row in reduced.cells for cell in row)
    if joint == 0.0:
        return MetricValue(
            metric_id=NMI,
            value=None,
            direction=ASSOCIATION,
            bounds=(0.0, 1.0),
            reason=ZERO_DENOMINATOR,
            notes=notes,
        )
    return MetricValue(
        metric_id=NMI,
        value=mutual_information(reduced) / joint,
        direction=ASSOCIATION,
        bounds=(0.0, 1.0),
        notes=notes,
    )


def degrees_of_freedom(table: ContingencyTable) -> int:
    """min(|G|-1, |Y|-1) over represented rows/columns."""
    reduced, _, _ = table.drop_unrepresented()
    return min(len(reduced.groups) - 1, len(reduced.labels) - 1)


def classify_cramers_v(v: float, dof: int, mode: str = COHEN) -> BiasStrength:
    """Band an association value against DoF-scaled effect-size thresholds.

    cohen reads the 0.1/0.3/0.5 cutoffs as lower edges of weak/medium/strong
    (values below 0.1/sqrt(dof) are negligible); literal reads each cutoff
    as an upper edge, so there is no negligible band and anything at or
    above the middle cutoff is strong.
    """
    if not (0.0 <= v <= 1.0 + 1e-9):
        raise ValueError(f"association value out of range: {v}")
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    if mode not in THRESHOLD_MODES:
        raise ValueError(f"unknown threshold mode {mode!r}")
    scale = 1.0 / math.sqrt(dof)
    t1, t2, t3 = (base * scale for base in _BASE_THRESHOLDS)
    if mode == COHEN:
        if v < t1:
            band = NEGLIGIBLE
        elif v < t2:
            band = WEAK
        elif v < t3:
            band = MEDIUM
        else:
            band = STRONG
    else:
        if v < t1:
            band = WEAK
        elif v < t2:
            band = MEDIUM
        else:
            band = STRONG
    return BiasStrength(band=band, dof=dof, thresholds=(t1, t2, t3))


def all_stereotypical(table: ContingencyTable) -> dict[str, MetricValue]:
    """Every bounded stereotypical metric plus chi-squared, keyed by id."""
    values = {
        CHI_SQUARED: chi_squared(table),
        CRAMERS_V: cramers_v(table),
        TSCHUPROW_T: tschuprow_t(table),
        PEARSON_C: pearson_contingency(table),
        THEIL_U: theils_u(table, "default"),
        THEIL_U_REVERSE: theils_u(table, "reverse"),
        NMI: normalized_mutual_information(table),
    }
    return values
