import math

import pytest

from biaslens.core import SINGLE_GROUP, validate_profile
from biaslens.representational import (
    all_representational,
    berger_parker,
    effective_number_of_species,
    inverse_imbalance_ratio,
    normalized_std,
    richness,
    shannon_entropy,
    shannon_evenness,
    simpson_family,
)
from biaslens.synth import SynthSpec, random_profile

from oracles import close, profile_reference

# the uneven three-group population used across the metric examples
SKEWED = validate_profile({"white": 45, "black": 45, "indian": 10})
SINGLE = validate_profile({"only": 37})
UNIFORM7 = validate_profile({f"g{i}": 10 for i in range(7)})


class TestRichness:
    def test_two_groups(self):
        assert richness(validate_profile({"m": 50, "f": 50})).value == 2.0

    def test_single_group(self):
        assert richness(SINGLE).value == 1.0

    def test_zero_counts_ignored(self):
        assert richness(validate_profile({"a": 3, "b": 0, "c": 1})).value == 2.0

    def test_bounds_use_vocabulary(self):
        mv = richness(validate_profile({"a": 3, "b": 0, "c": 1}))
        assert mv.bounds == (1.0, 3.0)


class TestShannonEntropy:
    def test_even_pair(self):
        assert shannon_entropy(validate_profile({"m": 1, "f": 1})).value == pytest.approx(
            math.log(2), abs=1e-12
        )

    def test_single_group_zero(self):
        assert shannon_entropy(SINGLE).value == 0.0

    def test_skewed(self):
        assert shannon_entropy(SKEWED).value == pytest.approx(0.948915, abs=1e-6)


class TestShannonEvenness:
    def test_uniform_is_one(self):
        for k in (2, 3, 7):
            profile = validate_profile({f"g{i}": 5 for i in range(k)})
            assert shannon_evenness(profile).value == pytest.approx(1.0, abs=1e-12)

    def test_skewed(self):
        assert shannon_evenness(SKEWED).value == pytest.approx(0.863740, abs=1e-6)

    def test_single_group_undefined(self):
        mv = shannon_evenness(SINGLE)
        assert not mv.defined
        assert mv.reason == SINGLE_GROUP


class TestNormalizedStd:
    def test_uniform_zero(self):
        assert normalized_std(UNIFORM7).value == pytest.approx(0.0, abs=1e-12)

    def test_near_total_concentration(self):
        mv = normalized_std(validate_profile({"a": 999, "b": 1}))
        assert mv.value == pytest.approx(0.998, abs=1e-9)

    def test_skewed(self):
        assert normalized_std(SKEWED).value == pytest.approx(0.350000, abs=1e-9)

    def test_single_group_undefined(self):
        mv = normalized_std(SINGLE)
        assert not mv.defined
        assert mv.reason == SINGLE_GROUP

    def test_unrepresented_group_excluded(self):
        # (1.0, 0.0): the empty group drops out, leaving a single-group profile
        mv = normalized_std(validate_profile({"a": 10, "b": 0}))
        assert not mv.defined
        assert mv.reason == SINGLE_GROUP


class TestInverseImbalanceRatio:
    def test_balanced(self):
        assert inverse_imbalance_ratio(validate_profile({"a": 50, "b": 50})).value == 1.0

    def test_ninety_ten(self):
        mv = inverse_imbalance_ratio(validate_profile({"a": 90, "b": 10}))
        assert mv.value == pytest.approx(1 / 9, abs=1e-12)

    def test_single_group_returns_one(self):
        # most and least represented group coincide
        assert inverse_imbalance_ratio(SINGLE).value == 1.0


class TestBergerParker:
    def test_uniform(self):
        assert berger_parker(UNIFORM7).value == pytest.approx(1 / 7, abs=1e-12)

    def test_skewed(self):
        assert berger_parker(SKEWED).value == 0.45

    def test_single_group(self):
        assert berger_parker(SINGLE).value == 1.0


class TestEffectiveSpecies:
    def test_uniform_equals_group_count(self):
        for k in (2, 5, 9):
            profile = validate_profile({f"g{i}": 4 for i in range(k)})
            assert effective_number_of_species(profile).value == pytest.approx(k, abs=1e-9)

    def test_single_group(self):
        assert effective_number_of_species(SINGLE).value == 1.0

    def test_skewed(self):
        assert effective_number_of_species(SKEWED).value == pytest.approx(
            2.582907, abs=1e-6
        )

    def test_exactly_exp_of_entropy(self):
        for seed in range(20):
            profile = random_profile(SynthSpec(seed=seed, groups=6, n=300, concentration=1.5))
            h = shannon_entropy(profile).value
            assert effective_number_of_species(profile).value == math.exp(h)


class TestSimpsonFamily:
    def test_uniform(self):
        d, one_minus, reciprocal = simpson_family(UNIFORM7)
        assert d.value == pytest.approx(1 / 7, abs=1e-12)
        assert reciprocal.value == pytest.approx(7.0, abs=1e-9)

    def test_single_group(self):
        d, one_minus, reciprocal = simpson_family(SINGLE)
        assert (d.value, one_minus.value, reciprocal.value) == (1.0, 0.0, 1.0)

    def test_skewed(self):
        d, one_minus, reciprocal = simpson_family(SKEWED)
        assert d.value == pytest.approx(0.415, abs=1e-9)
        assert one_minus.value == pytest.approx(0.585, abs=1e-9)
        assert reciprocal.value == pytest.approx(2.409639, abs=1e-6)


class TestProperties:
    def _profiles(self, count=300):
        for seed in range(count):
            yield random_profile(
                SynthSpec(
                    seed=seed,
                    groups=2 + seed % 8,
                    concentration=(seed % 5) * 0.8,
                    sparsity=0.3 if seed % 3 == 0 else 0.0,
                    n=20 + seed % 200,
                )
            )

    def test_oracle_equivalence(self):
        for profile in self._profiles():
            reference = profile_reference(list(profile.counts))
            computed = all_representational(profile)
            for metric_id, expected in reference.items():
                assert close(computed[metric_id].value, expected), (
                    profile.counts,
                    metric_id,
                )

    def test_bounds_and_uniform_equality(self):
        for profile in self._profiles():
            values = all_representational(profile)
            r = values["richness"].value
            ens = values["effective_species"].value
            recip = values["simpson_reciprocal"].value
            assert 1.0 - 1e-9 <= ens <= r + 1e-9
            assert 1.0 - 1e-9 <= recip <= r + 1e-9
            assert values["berger_parker"].value >= 1.0 / r - 1e-9
            assert values["inv_imbalance_ratio"].value <= 1.0
            present = sorted(c for c in profile.counts if c > 0)
            uniform = present[0] == present[-1]
            assert (abs(ens - r) < 1e-9) == uniform
            if values["normalized_std"].defined:
                assert (values["normalized_std"].value < 1e-9) == uniform

    def test_group_permutation_invariance(self):
        for seed in (3, 17, 91):
            profile = random_profile(SynthSpec(seed=seed, groups=7, n=500, concentration=1.2))
            mapping = profile.as_mapping()
            shuffled = validate_profile(dict(sorted(mapping.items(), reverse=True)))
            a = all_representational(profile)
            b = all_representational(shuffled)
            for metric_id in a:
                assert a[metric_id].value == b[metric_id].value

    def test_count_scaling_invariance(self):
        for seed in (5, 23):
            profile = random_profile(SynthSpec(seed=seed, groups=5, n=120, concentration=0.9))
            for k in (2, 10, 1000):
                scaled = validate_profile(
                    {g: c * k for g, c in profile.as_mapping().items()}
                )
                a = all_representational(profile)
                b = all_representational(scaled)
                for metric_id in a:
                    if a[metric_id].defined:
                        assert abs(a[metric_id].value - b[metric_id].value) <= 1e-12

    def test_evenness_ignores_vocabulary_padding(self):
        profile = validate_profile({"a": 45, "b": 45, "c": 10})
        padded = validate_profile({"a": 45, "b": 45, "c": 10, "d": 0, "e": 0})
        assert shannon_evenness(profile).value == shannon_evenness(padded).value
