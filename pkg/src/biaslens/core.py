"""Domain types shared by every metric module.

All types are immutable after construction and safe to share across
threads. Counts are exact integers; proportions are IEEE doubles and all
summations go through :func:`math.fsum` so results do not depend on the
order groups were supplied in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

# Reasons a metric can be undefined instead of numeric.
SINGLE_GROUP = "single-group-degenerate"
ZERO_DENOMINATOR = "zero-denominator"
EMPTY_INPUT = "empty-input"
ZERO_MARGINAL = "zero-marginal"

# Metric orientations.
DIVERSITY = "diversity"
BIAS = "bias"
ASSOCIATION = "association"

PROPORTION_TOL = 1e-12
BOUNDS_TOL = 1e-9


class ValidationError(ValueError):
    """Raised when raw input cannot be turned into a valid domain object."""


def _check_names(names: Sequence[str], what: str) -> None:
    if len(names) == 0:
        raise ValidationError(f"{what}: empty name list")
    seen = set()
    for name in names:
        if not name:
            raise ValidationError(f"{what}: empty name")
        if name in seen:
            raise ValidationError(f"{what}: duplicate name {name!r}")
        seen.add(name)


@dataclass(frozen=True)
class DemographicSchema:
    """Declared demographic components (ordered group vocabularies) plus
    the target label vocabulary."""

    components: tuple[tuple[str, tuple[str, ...]], ...]
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        _check_names([name for name, _ in self.components], "schema components")
        for name, groups in self.components:
            _check_names(groups, f"component {name!r} groups")
        _check_names(self.labels, "labels")

    @property
    def component_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.components)

    def groups_for(self, component: str) -> tuple[str, ...]:
        for name, groups in self.components:
            if name == component:
                return groups
        raise KeyError(component)


@dataclass(frozen=True)
class PopulationProfile:
    """Per-group sample counts for one component of one dataset.

    ``groups`` preserves vocabulary order; zero-count groups are retained
    so reports can show schema-relative coverage. ``excluded`` records how
    many source rows were dropped for a missing value on this component.
    """

    component: str
    groups: tuple[str, ...]
    counts: tuple[int, ...]
    n: int
    excluded: int = 0

    def __post_init__(self) -> None:
        _check_names(self.groups, f"profile {self.component!r} groups")
        if len(self.groups) != len(self.counts):
            raise ValidationError("groups and counts length mismatch")
        for g, c in zip(self.groups, self.counts):
            if not isinstance(c, int) or isinstance(c, bool):
                raise ValidationError(f"count for {g!r} is not an integer")
            if c < 0:
                raise ValidationError(f"negative count for {g!r}")
        if self.n != sum(self.counts):
            raise ValidationError("n does not equal the sum of counts")
        if self.n <= 0:
            raise ValidationError("profile total is zero")
        if abs(math.fsum(self.proportions()) - 1.0) > PROPORTION_TOL:
            raise ValidationError("proportions do not sum to 1")

    def proportions(self) -> tuple[float, ...]:
        return tuple(c / self.n for c in self.counts)

    def as_mapping(self) -> dict[str, int]:
        return dict(zip(self.groups, self.counts))

    @property
    def zero_groups(self) -> tuple[str, ...]:
        """Vocabulary groups with no samples (kept, but flagged)."""
        return tuple(g for g, c in zip(self.groups, self.counts) if c == 0)


@dataclass(frozen=True)
class ContingencyTable:
    """Group x class sample counts for one component of one dataset."""

    component: str
    groups: tuple[str, ...]
    labels: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]
    n: int
    excluded: int = 0

    def __post_init__(self) -> None:
        _check_names(self.groups, f"table {self.component!r} groups")
        _check_names(self.labels, f"table {self.component!r} labels")
        if len(self.cells) != len(self.groups):
            raise ValidationError("cell rows do not match groups")
        for row in self.cells:
            if len(row) != len(self.labels):
                raise ValidationError("ragged cell matrix")
            for c in row:
                if not isinstance(c, int) or isinstance(c, bool):
                    raise ValidationError("non-integer cell")
                if c < 0:
                    raise ValidationError("negative cell")
        if self.n != sum(sum(row) for row in self.cells):
            raise ValidationError("n does not equal the sum of cells")
        if self.n <= 0:
            raise ValidationError("table total is zero")
        total = math.fsum(c / self.n for row in self.cells for c in row)
        if abs(total - 1.0) > PROPORTION_TOL:
            raise ValidationError("joint proportions do not sum to 1")

    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(row) for row in self.cells)

    def col_totals(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.cells))

    @property
    def unrepresented_groups(self) -> tuple[str, ...]:
        return tuple(g for g, t in zip(self.groups, self.row_totals()) if t == 0)

    @property
    def unrepresented_labels(self) -> tuple[str, ...]:
        return tuple(y for y, t in zip(self.labels, self.col_totals()) if t == 0)

    def drop_unrepresented(self) -> tuple["ContingencyTable", tuple[str, ...], tuple[str, ...]]:
        """Reduced table without zero-marginal rows/columns, plus the names
        that were dropped. Returns self when nothing is dropped."""
        dropped_g = self.unrepresented_groups
        dropped_y = self.unrepresented_labels
        if not dropped_g and not dropped_y:
            return self, (), ()
        keep_g = [i for i, g in enumerate(self.groups) if g not in dropped_g]
        keep_y = [j for j, y in enumerate(self.labels) if y not in dropped_y]
        cells = tuple(tuple(self.cells[i][j] for j in keep_y) for i in keep_g)
        reduced = ContingencyTable(
            component=self.component,
            groups=tuple(self.groups[i] for i in keep_g),
            labels=tuple(self.labels[j] for j in keep_y),
            cells=cells,
            n=self.n,
            excluded=self.excluded,
        )
        return reduced, dropped_g, dropped_y

    def row_profile(self) -> PopulationProfile:
        """Group marginals of this table as a population profile."""
        return PopulationProfile(
            component=self.component,
            groups=self.groups,
            counts=self.row_totals(),
            n=self.n,
            excluded=self.excluded,
        )

    def label_profile(self) -> PopulationProfile:
        """Class marginals of this table as a population profile."""
        return PopulationProfile(
            component="label",
            groups=self.labels,
            counts=self.col_totals(),
            n=self.n,
            excluded=self.excluded,
        )


@dataclass(frozen=True)
class MetricValue:
    """One metric outcome: either a number or an explicit undefined-with-reason.

    Undefined results are first-class values, not exceptions, so a batch
    report over many datasets never aborts on a degenerate input.
    """

    metric_id: str
    value: float | None
    direction: str
    bounds: tuple[float, float]
    reason: str | None = None
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if (self.value is None) == (self.reason is None):
            raise ValidationError("exactly one of value/reason must be set")
        if self.value is not None:
            lo, hi = self.bounds
            if not (lo - BOUNDS_TOL <= self.value <= hi + BOUNDS_TOL):
                raise ValidationError(
                    f"{self.metric_id}={self.value} outside bounds [{lo}, {hi}]"
                )

    @property
    def defined(self) -> bool:
        return self.value is not None


def validate_profile(
    raw_counts: Mapping[str, int], component: str = "", excluded: int = 0
) -> PopulationProfile:
    """Build a PopulationProfile from a raw group -> count mapping.

    Groups with zero count are retained (schema-relative reporting needs
    them) but are visible via ``zero_groups``. Rejects empty mappings,
    negative counts and all-zero totals with a diagnostic.
    """
    if not raw_counts:
        raise ValidationError("empty counts mapping")
    groups = tuple(raw_counts.keys())
    counts = tuple(raw_counts[g] for g in groups)
    for g, c in zip(groups, counts):
        if not isinstance(c, int) or isinstance(c, bool):
            raise ValidationError(f"count for {g!r} is not an integer")
        if c < 0:
            raise ValidationError(f"negative count for {g!r}: {c}")
    total = sum(counts)
    if total == 0:
        raise ValidationError("total count is zero")
    return PopulationProfile(
        component=component, groups=groups, counts=counts, n=total, excluded=excluded
    )


def validate_table(
    raw_cells: Sequence[Sequence[int]],
    groups: Sequence[str] | None = None,
    labels: Sequence[str] | None = None,
    component: str = "",
    excluded: int = 0,
) -> ContingencyTable:
    """Build a ContingencyTable from a raw cell matrix.

    Rows/columns whose marginal is zero are kept; metric operations decide
    whether to drop them (see ``drop_unrepresented``). Rejects ragged
    matrices, negative cells and all-zero totals.
    """
    if not raw_cells or not raw_cells[0]:
        raise ValidationError("empty cell matrix")
    width = len(raw_cells[0])
    for row in raw_cells:
        if len(row) != width:
            raise ValidationError("ragged cell matrix")
    if groups is None:
        groups = tuple(f"g{i}" for i in range(len(raw_cells)))
    if labels is None:
        labels = tuple(f"y{j}" for j in range(width))
    cells = tuple(tuple(row) for row in raw_cells)
    total = 0
    for row in cells:
        for c in row:
            if not isinstance(c, int) or isinstance(c, bool):
                raise ValidationError("non-integer cell")
            if c < 0:
                raise ValidationError(f"negative cell: {c}")
            total += c
    if total == 0:
        raise ValidationError("table total is zero")
    return ContingencyTable(
        component=component,
        groups=tuple(groups),
        labels=tuple(labels),
        cells=cells,
        n=total,
        excluded=excluded,
    )


def represented_groups(profile: PopulationProfile) -> tuple[str, ...]:
    """Groups with at least one sample, in vocabulary order."""
    return tuple(g for g, c in zip(profile.groups, profile.counts) if c > 0)


def entropy(proportions: Iterable[float]) -> float:
    """Shannon entropy (natural log) with the 0*ln(0)=0 convention."""
    return -math.fsum(p * math.log(p) for p in proportions if p > 0.0)
