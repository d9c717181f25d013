"""Representational bias metrics over a single population profile.

Every metric follows the represented-groups convention: proportions are
taken over the groups that actually occur (count > 0), so adding an empty
group to the vocabulary never changes a value. Results come back as
:class:`~biaslens.core.MetricValue` with per-profile bounds; degenerate
cases (a single represented group) yield explicit undefined values where
the mathematics breaks down instead of raising.
"""

from __future__ import annotations

import math

from .core import (
    BIAS,
    DIVERSITY,
    SINGLE_GROUP,
    MetricValue,
    PopulationProfile,
    entropy,
    represented_groups,
)

RICHNESS = "richness"
SHANNON_ENTROPY = "shannon_entropy"
SHANNON_EVENNESS = "shannon_evenness"
NORMALIZED_STD = "normalized_std"
INV_IMBALANCE = "inv_imbalance_ratio"
BERGER_PARKER = "berger_parker"
EFFECTIVE_SPECIES = "effective_species"
SIMPSON = "simpson"
SIMPSON_DIVERSITY = "simpson_diversity"
SIMPSON_RECIPROCAL = "simpson_reciprocal"

#: Canonical computation order for reports.
ALL_METRICS = (
    RICHNESS,
    SHANNON_EVENNESS,
    NORMALIZED_STD,
    INV_IMBALANCE,
    BERGER_PARKER,
    EFFECTIVE_SPECIES,
    SHANNON_ENTROPY,
    SIMPSON,
    SIMPSON_DIVERSITY,
    SIMPSON_RECIPROCAL,
)


def _represented(profile: PopulationProfile) -> tuple[list[int], int]:
    counts = [c for c in profile.counts if c > 0]
    return counts, len(counts)


def richness(profile: PopulationProfile) -> MetricValue:
    """Number of groups with at least one sample."""
    r = len(represented_groups(profile))
    return MetricValue(
        metric_id=RICHNESS,
        value=float(r),
        direction=DIVERSITY,
        bounds=(1.0, float(len(profile.groups))),
    )


def shannon_entropy(profile: PopulationProfile) -> MetricValue:
    """Entropy (natural log) of the represented-group proportions."""
    counts, r = _represented(profile)
    h = entropy(c / profile.n for c in counts)
    return MetricValue(
        metric_id=SHANNON_ENTROPY,
        value=h,
        direction=DIVERSITY,
        bounds=(0.0, math.log(r) if r > 1 else 0.0),
    )


def shannon_evenness(profile: PopulationProfile) -> MetricValue:
    """Entropy normalized by its maximum ln(R); undefined for R=1."""
    counts, r = _represented(profile)
    if r == 1:
        return MetricValue(
            metric_id=SHANNON_EVENNESS,
            value=None,
            direction=DIVERSITY,
            bounds=(0.0, 1.0),
            reason=SINGLE_GROUP,
        )
    h = entropy(c / profile.n for c in counts)
    return MetricValue(
        metric_id=SHANNON_EVENNESS,
        value=h / math.log(r),
        direction=DIVERSITY,
        bounds=(0.0, 1.0),
    )


def normalized_std(profile: PopulationProfile) -> MetricValue:
    """Standard deviation of the group proportions scaled to [0, 1].

    The group count in the scaling factor is the represented count R, which
    is what makes the metric undefined for single-group profiles (the
    factor divides by sqrt(R-1)).
    """
    counts, r = _represented(profile)
    if r == 1:
        return MetricValue(
            metric_id=NORMALIZED_STD,
            value=None,
            direction=BIAS,
            bounds=(0.0, 1.0),
            reason=SINGLE_GROUP,
        )
    mean = 1.0 / r
    var = math.fsum((c / profile.n - mean) ** 2 for c in counts) / r
    nsd = r / math.sqrt(r - 1) * math.sqrt(var)
    return MetricValue(
        metric_id=NORMALIZED_STD, value=nsd, direction=BIAS, bounds=(0.0, 1.0)
    )


def inverse_imbalance_ratio(profile: PopulationProfile) -> MetricValue:
    """min/max count ratio over represented groups.

    Returns 1 for a single represented group: the most and least
    represented groups coincide, which is exactly the blind spot that
    makes this metric unreliable on single-group data.
    """
    counts, r = _represented(profile)
    value = 1.0 if r == 1 else min(counts) / max(counts)
    return MetricValue(
        metric_id=INV_IMBALANCE, value=value, direction=DIVERSITY, bounds=(0.0, 1.0)
    )


def berger_parker(profile: PopulationProfile) -> MetricValue:
    """Population share of the most abundant group."""
    counts, r = _represented(profile)
    return MetricValue(
        metric_id=BERGER_PARKER,
        value=max(counts) / profile.n,
        direction=BIAS,
        bounds=(1.0 / r, 1.0),
    )


def effective_number_of_species(profile: PopulationProfile) -> MetricValue:
    """exp(entropy): the equivalent count of equally represented groups."""
    counts, r = _represented(profile)
    h = entropy(c / profile.n for c in counts)
    return MetricValue(
        metric_id=EFFECTIVE_SPECIES,
        value=math.exp(h),
        direction=DIVERSITY,
        bounds=(1.0, float(r)),
    )


def simpson_family(
    profile: PopulationProfile,
) -> tuple[MetricValue, MetricValue, MetricValue]:
    """Simpson index D = sum(p^2) plus its 1-D and 1/D variants."""
    counts, r = _represented(profile)
    d = math.fsum((c / profile.n) ** 2 for c in counts)
    index = MetricValue(
        metric_id=SIMPSON, value=d, direction=BIAS, bounds=(1.0 / r, 1.0)
    )
    diversity = MetricValue(
        metric_id=SIMPSON_DIVERSITY,
        value=1.0 - d,
        direction=DIVERSITY,
        bounds=(0.0, 1.0 - 1.0 / r),
    )
    reciprocal = MetricValue(
        metric_id=SIMPSON_RECIPROCAL,
        value=1.0 / d,
        direction=DIVERSITY,
        bounds=(1.0, float(r)),
    )
    return index, diversity, reciprocal


def all_representational(profile: PopulationProfile) -> dict[str, MetricValue]:
    """Every representational metric, keyed by id in canonical order."""
    simpson, simpson_div, simpson_rec = simpson_family(profile)
    values = {
        RICHNESS: richness(profile),
        SHANNON_EVENNESS: shannon_evenness(profile),
        NORMALIZED_STD: normalized_std(profile),
        INV_IMBALANCE: inverse_imbalance_ratio(profile),
        BERGER_PARKER: berger_parker(profile),
        EFFECTIVE_SPECIES: effective_number_of_species(profile),
        SHANNON_ENTROPY: shannon_entropy(profile),
        SIMPSON: simpson,
        SIMPSON_DIVERSITY: simpson_div,
        SIMPSON_RECIPROCAL: simpson_rec,
    }
    return {m: values[m] for m in ALL_METRICS}
