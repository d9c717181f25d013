"""Deterministic synthetic profiles, tables and sample rows for testing.

The generator is a counter-based 64-bit mix (splitmix64) specified by
algorithm rather than borrowed from a library, so identical seeds produce
identical fixtures everywhere. Counts are apportioned by largest remainder,
which keeps totals exact and makes zero concentration maximally even.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    ContingencyTable,
    DemographicSchema,
    PopulationProfile,
    ValidationError,
    validate_profile,
    validate_table,
)

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 stream; next_unit() yields uniform doubles in [0, 1)."""

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_unit(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def pick_weighted(self, weights: list[float]) -> int:
        """Index drawn proportionally to non-negative weights."""
        total = math.fsum(weights)
        x = self.next_unit() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += w
            if x < acc:
                return i
        return len(weights) - 1


@dataclass(frozen=True)
class SynthSpec:
    """Shape of a synthetic population or table.

    concentration 0 gives a maximally even split; larger values skew mass
    toward a few groups. sparsity is the probability a group/cell is forced
    empty. independent makes table cells a product of row and column
    weights, so association vanishes up to integer rounding.
    """

    seed: int
    groups: int
    classes: int = 1
    concentration: float = 0.0
    sparsity: float = 0.0
    n: int = 1000
    independent: bool = False

    def __post_init__(self) -> None:
        if self.groups < 1 or self.classes < 1:
            raise ValidationError("group and class counts must be >= 1")
        if self.n < 1:
            raise ValidationError("n must be >= 1")
        if not 0.0 <= self.sparsity < 1.0:
            raise ValidationError("sparsity must be in [0, 1)")
        if self.concentration < 0.0:
            raise ValidationError("concentration must be >= 0")
        if self.sparsity == 0.0 and self.n < self.groups:
            raise ValidationError("n must be >= group count when sparsity is 0")


def _apportion(weights: list[float], n: int) -> list[int]:
    """Largest-remainder rounding of n * weights/sum to integer counts."""
    total = math.fsum(weights)
    quotas = [w / total * n for w in weights]
    counts = [math.floor(q) for q in quotas]
    shortfall = n - sum(counts)
    remainders = sorted(
        range(len(weights)), key=lambda i: (-(quotas[i] - counts[i]), i)
    )
    for i in remainders[:shortfall]:
        counts[i] += 1
    return counts


def _weights(stream: SplitMix64, count: int, concentration: float) -> list[float]:
    return [stream.next_unit() ** concentration for _ in range(count)]


def _sparsify(stream: SplitMix64, weights: list[float], sparsity: float) -> list[float]:
    if sparsity == 0.0:
        return weights
    kept = [0.0 if stream.next_unit() < sparsity else w for w in weights]
    if all(w == 0.0 for w in kept):
        # keep the heaviest entry so the population is never empty
        kept[max(range(len(weights)), key=lambda i: (weights[i], -i))] = 1.0
    return kept


def random_profile(spec: SynthSpec) -> PopulationProfile:
    """Deterministic profile over groups g0..g{k-1} summing exactly to n."""
    stream = SplitMix64(spec.seed)
    weights = _weights(stream, spec.groups, spec.concentration)
    weights = _sparsify(stream, weights, spec.sparsity)
    counts = _apportion(weights, spec.n)
    names = [f"g{i}" for i in range(spec.groups)]
    return validate_profile(dict(zip(names, counts)), component="synth")


def random_table(spec: SynthSpec) -> ContingencyTable:
    """Deterministic groups x classes table summing exactly to n."""
    stream = SplitMix64(spec.seed)
    if spec.independent:
        row_w = _weights(stream, spec.groups, spec.concentration)
        col_w = _weights(stream, spec.classes, spec.concentration)
        flat = [r * c for r in row_w for c in col_w]
    else:
        flat = _weights(stream, spec.groups * spec.classes, spec.concentration)
    flat = _sparsify(stream, flat, spec.sparsity)
    counts = _apportion(flat, spec.n)
    cells = [
        counts[i * spec.classes : (i + 1) * spec.classes] for i in range(spec.groups)
    ]
    return validate_table(
        cells,
        groups=[f"g{i}" for i in range(spec.groups)],
        labels=[f"y{j}" for j in range(spec.classes)],
        component="synth",
    )


def random_sample_rows(
    seed: int,
    schema: DemographicSchema,
    n: int,
    label_concentration: float = 0.5,
    association: float = 0.5,
    missing_rate: float = 0.0,
) -> list[dict[str, str]]:
    """Rows for a sample CSV: one dict per record with label and group values.

    association blends a shared per-component base distribution with an
    independent per-label one, so 0 gives (near) label-independent
    demographics and 1 gives strongly stereotyped ones. Missing values are
    emitted as empty strings.
    """
    stream = SplitMix64(seed)
    label_w = _weights(stream, len(schema.labels), label_concentration)
    cond: dict[str, list[list[float]]] = {}
    for name, groups in schema.components:
        base = _weights(stream, len(groups), 1.0)
        cond[name] = []
        for _ in schema.labels:
            direct = _weights(stream, len(groups), 1.0)
            cond[name].append(
                [
                    (1.0 - association) * b + association * d
                    for b, d in zip(base, direct)
                ]
            )
    rows: list[dict[str, str]] = []
    for i in range(n):
        y = stream.pick_weighted(label_w)
        row = {"file": f"img{i:05d}.png", "label": schema.labels[y]}
        for name, groups in schema.components:
            if missing_rate > 0.0 and stream.next_unit() < missing_rate:
                row[name] = ""
            else:
                row[name] = groups[stream.pick_weighted(cond[name][y])]
        rows.append(row)
    return rows
