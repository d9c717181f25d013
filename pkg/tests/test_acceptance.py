"""Acceptance suite: one test per criterion, one printed line per criterion.

Run with `pytest tests/test_acceptance.py -s` to see the pass/fail lines.
"""

import hashlib
import json
import math
import time
from pathlib import Path

import pytest
import scipy.stats

from biaslens.agreement import local_agreement, metric_agreement, spearman_rho
from biaslens.cli import main
from biaslens.core import SINGLE_GROUP, validate_profile, validate_table
from biaslens.fixtures import bundled_manifest_path
from biaslens.local_bias import duchers_z_matrix, npmi_matrix
from biaslens.representational import all_representational
from biaslens.stereotypical import (
    all_stereotypical,
    classify_cramers_v,
    conditional_entropy,
    marginal_entropy,
)
from biaslens.synth import SplitMix64, SynthSpec, random_profile, random_table

from oracles import (
    close,
    npmi_reference,
    profile_reference,
    table_reference,
    z_reference,
)

MANIFEST = str(bundled_manifest_path())


def _report(num: int, ok: bool, detail: str) -> None:
    print(f"[criterion {num}] {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    assert ok, f"criterion {num}: {detail}"


def _profiles(count, base_seed=0):
    for k in range(count):
        seed = base_seed + k
        yield random_profile(
            SynthSpec(
                seed=seed,
                groups=1 + seed % 9,
                concentration=(seed % 6) * 0.6,
                sparsity=0.3 if seed % 4 == 0 else 0.0,
                n=10 + seed % 500,
            )
        )


def _tables(count, base_seed=10_000, sparsity_every=3):
    for k in range(count):
        seed = base_seed + k
        yield random_table(
            SynthSpec(
                seed=seed,
                groups=2 + seed % 8,
                classes=2 + seed % 6,
                concentration=(seed % 4) * 0.8,
                sparsity=0.4 if seed % sparsity_every == 0 else 0.0,
                n=20 + seed % 600,
                independent=seed % 7 == 0,
            )
        )


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


class TestCriterion1:
    def test_oracle_equivalence_1000_profiles_1000_tables(self):
        start = time.perf_counter()
        checked = 0
        for profile in _profiles(1000):
            reference = profile_reference(list(profile.counts))
            computed = all_representational(profile)
            for metric_id, expected in reference.items():
                assert close(computed[metric_id].value, expected), (
                    profile.counts, metric_id,
                )
                checked += 1
        for table in _tables(1000):
            cells = [list(row) for row in table.cells]
            reference = table_reference(cells)
            computed = all_stereotypical(table)
            for metric_id, mv in computed.items():
                assert close(mv.value, reference[metric_id]), (cells, metric_id)
                checked += 1
            reduced, _, _ = table.drop_unrepresented()
            assert close(marginal_entropy(reduced, "groups"), reference["marginal_entropy_groups"])
            assert close(marginal_entropy(reduced, "labels"), reference["marginal_entropy_labels"])
            assert close(
                conditional_entropy(reduced, given="labels"),
                reference["conditional_entropy_given_labels"],
            )
            assert close(
                conditional_entropy(reduced, given="groups"),
                reference["conditional_entropy_given_groups"],
            )
            npmi_ref = npmi_reference(cells)
            z_ref = z_reference(cells)
            npmi = npmi_matrix(table)
            z = duchers_z_matrix(table)
            for i in range(len(table.groups)):
                for j in range(len(table.labels)):
                    assert close(npmi.values[i][j], npmi_ref[i][j]), (cells, i, j)
                    assert close(z.values[i][j], z_ref[i][j]), (cells, i, j)
                    checked += 2
        elapsed = time.perf_counter() - start
        _report(
            1,
            elapsed < 30.0,
            f"{checked} metric values match the arbitrary-precision oracle within 1e-9 "
            f"in {elapsed:.1f}s (< 30s)",
        )


class TestCriterion2:
    def test_closed_form_fixtures(self):
        skewed = validate_profile({"white": 45, "black": 45, "indian": 10})
        rep = all_representational(skewed)
        checks = [
            ("entropy", rep["shannon_entropy"].value, 0.948915),
            ("evenness", rep["shannon_evenness"].value, 0.863740),
            ("normalized std", rep["normalized_std"].value, 0.350000),
            ("effective species", rep["effective_species"].value, 2.582907),
            ("simpson", rep["simpson"].value, 0.415000),
            ("simpson diversity", rep["simpson_diversity"].value, 0.585000),
            ("simpson reciprocal", rep["simpson_reciprocal"].value, 2.409639),
        ]
        tilted = all_stereotypical(validate_table([[8, 2], [2, 8]]))
        checks += [
            ("cramers v", tilted["cramers_v"].value, 0.6),
            ("tschuprow t", tilted["tschuprow_t"].value, 0.6),
            ("pearson c", tilted["pearson_contingency"].value, 0.514496),
        ]
        nested_table = validate_table([[2, 2], [0, 4]])
        nested = all_stereotypical(nested_table)
        checks += [
            ("chi2 nested", nested["chi_squared"].value, 2.666667),
            ("theil u", nested["theil_u"].value, 0.383688),
            ("theil u reverse", nested["theil_u_reverse"].value, 0.311278),
            ("nmi", nested["nmi"].value, 0.207519),
        ]
        diagonal = all_stereotypical(validate_table([[10, 0], [0, 10]]))
        checks += [
            ("chi2 diagonal", diagonal["chi_squared"].value, 20.0),
            ("pearson c cap", diagonal["pearson_contingency"].value, 0.707107),
        ]
        for name, actual, expected in checks:
            assert actual == pytest.approx(expected, abs=1.5e-6), name
        z = duchers_z_matrix(nested_table)
        assert z.values == ((1.0, -1.0), (-1.0, 1.0))
        npmi = npmi_matrix(validate_table([[0, 5], [5, 5]]))
        assert npmi.values[0][0] == -1.0
        _report(2, True, f"{len(checks) + 2} closed-form fixture values reproduced")


class TestCriterion3:
    def test_bounds_on_10000_random_inputs(self):
        entropies = []
        effective = []
        profiles_checked = 0
        for profile in _profiles(5000, base_seed=50_000):
            values = all_representational(profile)
            r = values["richness"].value
            vocab = float(len(profile.groups))
            h = values["shannon_entropy"].value
            ens = values["effective_species"].value
            bounds = {
                "richness": (1.0, vocab),
                "shannon_entropy": (0.0, math.log(r) if r > 1 else 0.0),
                "shannon_evenness": (0.0, 1.0),
                "normalized_std": (0.0, 1.0),
                "inv_imbalance_ratio": (0.0, 1.0),
                "berger_parker": (1.0 / r, 1.0),
                "effective_species": (1.0, r),
                "simpson": (1.0 / r, 1.0),
                "simpson_diversity": (0.0, 1.0 - 1.0 / r),
                "simpson_reciprocal": (1.0, r),
            }
            for metric_id, (lo, hi) in bounds.items():
                mv = values[metric_id]
                if mv.defined:
                    assert lo - 1e-9 <= mv.value <= hi + 1e-9, (metric_id, profile.counts)
            assert ens == math.exp(h), "effective species must be exactly exp(entropy)"
            entropies.append(h)
            effective.append(ens)
            profiles_checked += 1
        assert spearman_rho(entropies, effective) == 1.0
        tables_checked = 0
        for table in _tables(5000, base_seed=90_000):
            values = all_stereotypical(table)
            for metric_id, mv in values.items():
                if not mv.defined:
                    continue
                if metric_id == "chi_squared":
                    assert mv.value >= -1e-9
                else:
                    assert -1e-9 <= mv.value <= 1.0 + 1e-9, metric_id
            if values["cramers_v"].defined:
                assert values["pearson_contingency"].value < 1.0
                assert values["tschuprow_t"].value <= values["cramers_v"].value + 1e-12
            tables_checked += 1
        _report(
            3,
            True,
            f"bounds hold on {profiles_checked + tables_checked} random inputs; "
            "exp(entropy) exact; entropy/effective-species orderings identical (rho=1); "
            "T <= V; C < 1",
        )


class TestCriterion4:
    def test_permutation_and_scaling_invariance(self):
        checked = 0
        for idx, profile in enumerate(_profiles(150, base_seed=120_000)):
            base = all_representational(profile)
            mapping = profile.as_mapping()
            permuted = validate_profile(dict(sorted(mapping.items(), reverse=True)))
            permuted_values = all_representational(permuted)
            for metric_id, mv in base.items():
                other = permuted_values[metric_id]
                if mv.defined:
                    assert abs(other.value - mv.value) <= 1e-12, metric_id
                else:
                    assert other.reason == mv.reason
            for k in (2, 10, 1000):
                scaled = validate_profile({g: c * k for g, c in mapping.items()})
                scaled_values = all_representational(scaled)
                for metric_id, mv in base.items():
                    if mv.defined:
                        assert abs(scaled_values[metric_id].value - mv.value) <= 1e-12, metric_id
                checked += 1
        for table in _tables(150, base_seed=130_000):
            base = all_stereotypical(table)
            base_z = duchers_z_matrix(table)
            base_npmi = npmi_matrix(table)
            permuted = validate_table(
                [list(reversed(row)) for row in reversed(table.cells)],
                groups=list(reversed(table.groups)),
                labels=list(reversed(table.labels)),
            )
            permuted_values = all_stereotypical(permuted)
            for metric_id, mv in base.items():
                if mv.defined:
                    assert abs(permuted_values[metric_id].value - mv.value) <= 1e-12, metric_id
            for k in (2, 10, 1000):
                scaled = validate_table([[c * k for c in row] for row in table.cells])
                scaled_values = all_stereotypical(scaled)
                for metric_id, mv in base.items():
                    if not mv.defined:
                        continue
                    if metric_id == "chi_squared":
                        # the raw statistic scales with n by definition; its
                        # normalized forms below must not move at all
                        assert scaled_values[metric_id].value == pytest.approx(
                            mv.value * k, rel=1e-9
                        )
                    else:
                        assert abs(scaled_values[metric_id].value - mv.value) <= 1e-12, metric_id
                scaled_z = duchers_z_matrix(scaled)
                scaled_npmi = npmi_matrix(scaled)
                for i in range(len(table.groups)):
                    for j in range(len(table.labels)):
                        for a, b in (
                            (base_z.values[i][j], scaled_z.values[i][j]),
                            (base_npmi.values[i][j], scaled_npmi.values[i][j]),
                        ):
                            if a is None:
                                assert b is None
                            else:
                                assert abs(a - b) <= 1e-12
                checked += 1
        _report(
            4,
            True,
            f"{checked} permutation/scaling cases (k in 2,10,1000) leave every "
            "normalized metric unchanged within 1e-12",
        )


class TestCriterion5:
    def test_single_group_degenerate_paths(self):
        for n in (1, 37, 5000):
            profile = validate_profile({"only": n})
            values = all_representational(profile)
            assert values["shannon_evenness"].reason == SINGLE_GROUP
            assert values["normalized_std"].reason == SINGLE_GROUP
            assert values["inv_imbalance_ratio"].value == 1.0
            assert values["richness"].value == 1.0
            assert values["effective_species"].value == 1.0
            assert values["berger_parker"].value == 1.0
        # same story when the vocabulary is larger but only one group occurs
        padded = validate_profile({"a": 42, "b": 0, "c": 0})
        values = all_representational(padded)
        assert values["shannon_evenness"].reason == SINGLE_GROUP
        assert values["normalized_std"].reason == SINGLE_GROUP
        assert values["inv_imbalance_ratio"].value == 1.0
        assert values["richness"].value == 1.0
        _report(
            5,
            True,
            "single-group profiles: evenness metrics undefined "
            "(single-group-degenerate), richness/effective-species/dominance "
            "metrics pinned at their degenerate values",
        )


class TestCriterion6:
    @pytest.mark.filterwarnings("ignore::scipy.stats.ConstantInputWarning")
    def test_local_sign_agreement_on_1000_sparse_tables(self):
        minus_one_seen = 0
        rho_checked = 0
        for table in _tables(1000, base_seed=200_000, sparsity_every=1):
            npmi = npmi_matrix(table)
            z = duchers_z_matrix(table)
            n = table.n
            rows = table.row_totals()
            cols = table.col_totals()
            xs, ys = [], []
            for i in range(len(table.groups)):
                for j in range(len(table.labels)):
                    a, b = npmi.values[i][j], z.values[i][j]
                    if table.cells[i][j] == 0 and rows[i] > 0 and cols[j] > 0:
                        assert a == -1.0, (table.cells, i, j)
                        minus_one_seen += 1
                    if a is None or b is None:
                        continue
                    assert _sign(a) == _sign(b), (table.cells, i, j)
                    xs.append(a)
                    ys.append(b)
            if len(xs) >= 3:
                mine = local_agreement(npmi, z)
                expected = scipy.stats.spearmanr(xs, ys).statistic
                if mine is None:
                    assert math.isnan(expected)
                else:
                    assert mine == pytest.approx(expected, abs=1e-9)
                rho_checked += 1
        assert minus_one_seen > 100
        _report(
            6,
            True,
            f"sign(NPMI)=sign(Z) on all jointly-defined cells; {minus_one_seen} empty "
            f"subgroups hit NPMI=-1; NPMI-Z rho matches the oracle on {rho_checked} tables",
        )


class TestCriterion7:
    @pytest.mark.filterwarnings("ignore::scipy.stats.ConstantInputWarning")
    def test_agreement_machinery(self):
        stream = SplitMix64(31337)
        compared = 0
        for trial in range(300):
            n = 4 + trial % 10
            xs = [float(stream.next_u64() % 6) for _ in range(n)]
            ys = [float(stream.next_u64() % 6) for _ in range(n)]
            mine = spearman_rho(xs, ys)
            expected = scipy.stats.spearmanr(xs, ys).statistic
            if mine is None:
                assert math.isnan(expected)
            else:
                assert mine == pytest.approx(expected, abs=1e-9)
                compared += 1
        h = {"d1": 0.21, "d2": 1.4, "d3": 0.8, "d4": 0.5}
        values = {
            comp: {
                "shannon_entropy": dict(h),
                "effective_species": {k: math.exp(v) for k, v in h.items()},
                "simpson": {k: 1.0 / (1.0 + v) for k, v in h.items()},
            }
            for comp in ("age", "gender", "race")
        }
        matrix = metric_agreement(values)
        k = len(matrix.metrics)
        for i in range(k):
            assert matrix.cells[i][i] == 1.0
            for j in range(k):
                assert matrix.cells[i][j] == matrix.cells[j][i]
        assert matrix.cell("shannon_entropy", "effective_species") == 1.0
        _report(
            7,
            True,
            f"spearman matches the oracle on {compared} tie-bearing vectors; agreement "
            "matrices symmetric with unit diagonal; entropy/effective-species cell = 1.0",
        )


def _tree_digest(root: Path) -> dict:
    return {
        str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def _run_pass(out: Path, jobs: int = 1) -> None:
    args = ["--manifest", MANIFEST, "--out", str(out), "--jobs", str(jobs)]
    assert main(["analyze", *args]) == 0
    assert main(["agreement", *args, "--family", "representational"]) == 0
    assert main(["local", "--manifest", MANIFEST, "--out", str(out),
                 "--dataset", "itw-movies", "--component", "race", "--svg"]) == 0


def _recompute_ranking(grid_payload: dict) -> list[str]:
    datasets = grid_payload["datasets"]
    sums = {ds: 0.0 for ds in datasets}
    counts = {ds: 0 for ds in datasets}
    for row in grid_payload["rows"]:
        raw = [cell["value"] for cell in row["cells"]]
        defined = [v for v in raw if v is not None]
        if not defined or max(defined) <= 0:
            continue
        peak = max(defined)
        for ds, v in zip(datasets, raw):
            if v is not None:
                sums[ds] += v / peak
                counts[ds] += 1
    descending = grid_payload["orientation"] == "diversity"
    scored = [
        ((-1 if descending else 1) * sums[ds] / counts[ds], ds)
        for ds in datasets
        if counts[ds]
    ]
    empty = sorted(ds for ds in datasets if not counts[ds])
    return [ds for _, ds in sorted(scored)] + empty


class TestCriterion8:
    def test_end_to_end_determinism(self, tmp_path):
        first = tmp_path / "run1"
        start = time.perf_counter()
        _run_pass(first)
        elapsed = time.perf_counter() - start
        second = tmp_path / "run2"
        _run_pass(second)
        parallel = tmp_path / "run3"
        _run_pass(parallel, jobs=4)
        d1, d2, d3 = map(_tree_digest, (first, second, parallel))
        assert d1 == d2, "repeated runs differ"
        assert d1 == d3, "parallel run differs"
        report_payload = json.loads((first / "report.json").read_text())
        for family in ("representational", "stereotypical"):
            expected = _recompute_ranking(report_payload["grids"][family])
            assert report_payload["rankings"][family] == expected, family
        _report(
            8,
            elapsed < 10.0,
            f"{len(d1)} output files byte-identical across runs and --jobs 4; "
            f"rankings match the oracle recomputation; one full pass took {elapsed:.1f}s (< 10s)",
        )


class TestCriterion9:
    def test_threshold_classification_modes(self):
        assert classify_cramers_v(0.05, 1, "cohen").band == "negligible"
        assert classify_cramers_v(0.2, 1, "cohen").band == "weak"
        medium = classify_cramers_v(0.2, 4, "cohen")
        assert medium.band == "medium"
        assert medium.thresholds == pytest.approx((0.05, 0.15, 0.25), abs=1e-12)
        assert classify_cramers_v(0.2, 1, "literal").band == "medium"
        _report(
            9,
            True,
            "cohen bands: 0.05->negligible, 0.2->weak, (0.2,dof=4)->medium; "
            "literal mode reads 0.2 as medium",
        )
