"""Command-line interface: analyze, agreement, local, synth.

Datasets are processed independently; a malformed file fails its own
dataset but never aborts the run. All aggregation and emission is ordered
by name, so repeated runs (at any parallelism) produce identical bytes.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import agreement as agr
from . import local_bias
from . import report
from . import representational as rep
from . import stereotypical as stereo
from .core import ValidationError
from .ingest import (
    LABEL_COMPONENT,
    DatasetEntry,
    DatasetManifest,
    build_contingency,
    build_profile,
    load_manifest,
    load_sample_records,
    load_table_csv,
    schema_to_dict,
)
from .synth import SynthSpec, random_table

ALL_FORMATS = ("json", "csv", "md", "svg")

#: representational grid rows (simpson enters as its complement, so the
#: standalone 1-D variant would duplicate it)
REP_GRID_METRICS = tuple(
    m for m in rep.ALL_METRICS if m != rep.SIMPSON_DIVERSITY
)
STEREO_GRID_METRICS = stereo.ALL_METRICS


@dataclass(frozen=True)
class RunConfig:
    """Resolved options for one CLI invocation."""

    manifest: Path
    components: tuple[str, ...] | None = None
    metrics: tuple[str, ...] | None = None
    out: Path = Path("biaslens-out")
    formats: tuple[str, ...] = ALL_FORMATS
    threshold_mode: str = stereo.COHEN
    jobs: int = 1

    def __post_init__(self) -> None:
        for fmt in self.formats:
            if fmt not in ALL_FORMATS:
                raise ValidationError(f"unknown format {fmt!r}")
        if self.threshold_mode not in stereo.THRESHOLD_MODES:
            raise ValidationError(f"unknown threshold mode {self.threshold_mode!r}")
        if self.jobs < 1:
            raise ValidationError("jobs must be >= 1")


@dataclass
class DatasetResult:
    """Everything computed for one dataset (or the reason it failed)."""

    name: str
    kind: str
    input: str
    error: str | None = None
    profiles: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)
    rep_metrics: dict = field(default_factory=dict)
    stereo_metrics: dict = field(default_factory=dict)
    local: dict = field(default_factory=dict)
    strengths: dict = field(default_factory=dict)
    skipped: dict = field(default_factory=dict)


def _load_tables(entry: DatasetEntry, components, schema):
    """Per-component profiles/tables for one dataset entry."""
    profiles, tables, skipped = {}, {}, {}
    if entry.input == "samples":
        records = load_sample_records(entry.path, entry.columns, schema)
        for component in components:
            try:
                profiles[component] = build_profile(records, component, schema)
            except ValidationError as exc:
                skipped[component] = str(exc)
                continue
            if component != LABEL_COMPONENT:
                tables[component] = build_contingency(records, component, schema)
    else:
        first = None
        for component in components:
            if component == LABEL_COMPONENT:
                continue
            table_path = entry.path / f"{component}.csv"
            if not table_path.is_file():
                skipped[component] = f"no table file {table_path.name}"
                continue
            table = load_table_csv(table_path, component=component)
            tables[component] = table
            profiles[component] = table.row_profile()
            if first is None:
                first = table
        if LABEL_COMPONENT in components:
            if first is None:
                skipped[LABEL_COMPONENT] = "no component table to take label marginals from"
            else:
                profiles[LABEL_COMPONENT] = first.label_profile()
    return profiles, tables, skipped


def _analyze_dataset(entry: DatasetEntry, components, schema, mode: str) -> DatasetResult:
    result = DatasetResult(name=entry.name, kind=entry.kind, input=entry.input)
    try:
        profiles, tables, skipped = _load_tables(entry, components, schema)
        result.skipped = skipped
        result.profiles = profiles
        result.tables = tables
        for component, profile in profiles.items():
            result.rep_metrics[component] = rep.all_representational(profile)
        for component, table in tables.items():
            values = stereo.all_stereotypical(table)
            result.stereo_metrics[component] = values
            v = values[stereo.CRAMERS_V]
            if v.defined:
                dof = stereo.degrees_of_freedom(table)
                result.strengths[component] = stereo.classify_cramers_v(
                    v.value, dof, mode
                )
            result.local[component] = {
                local_bias.NPMI: local_bias.npmi_matrix(table),
                local_bias.DUCHERS_Z: local_bias.duchers_z_matrix(table),
            }
    except (ValidationError, FileNotFoundError, OSError) as exc:
        result.error = str(exc)
    return result


def _compute_results(
    manifest: DatasetManifest, components, config: RunConfig
) -> list[DatasetResult]:
    entries = sorted(manifest.datasets, key=lambda e: e.name)

    def worker(entry: DatasetEntry) -> DatasetResult:
        return _analyze_dataset(entry, components, manifest.schema, config.threshold_mode)

    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(worker, entries))
    else:
        results = [worker(entry) for entry in entries]
    return results


def _resolve_components(manifest: DatasetManifest, config: RunConfig):
    """(representational components, stereotypical components)."""
    names = manifest.schema.component_names
    if config.components is None:
        return (*names, LABEL_COMPONENT), names
    for component in config.components:
        if component != LABEL_COMPONENT and component not in names:
            raise ValidationError(f"unknown component {component!r}")
    rep_components = config.components
    stereo_components = tuple(
        c for c in config.components if c != LABEL_COMPONENT
    )
    return rep_components, stereo_components


def _grid_inputs(results, metrics, components, family):
    """(values, reasons) mappings keyed (metric, component, dataset)."""
    values, reasons = {}, {}
    for result in results:
        if result.error:
            continue
        source = result.rep_metrics if family == "representational" else result.stereo_metrics
        for component in components:
            per_metric = source.get(component, {})
            for metric_id in metrics:
                key = (metric_id, component, result.name)
                mv = per_metric.get(metric_id)
                if mv is None:
                    values[key] = None
                    reasons[key] = (
                        result.skipped.get(component, "component unavailable")
                    )
                elif not mv.defined:
                    values[key] = None
                    reasons[key] = mv.reason
                elif family == "representational":
                    converted = mv.value
                    if metric_id in report.DIVERSITY_VIEW_CONVERTED:
                        converted = report.to_bias_form(metric_id, mv.value)
                    values[key] = converted
                else:
                    values[key] = mv.value
    return values, reasons


def _build_family_grid(results, metrics, components, family):
    datasets = sorted(r.name for r in results if not r.error)
    rows = [
        (metric_id, component) for metric_id in metrics for component in components
    ]
    values, reasons = _grid_inputs(results, metrics, components, family)
    orientation = "diversity" if family == "representational" else "bias"
    grid = report.build_grid(orientation, rows, datasets, values, reasons)
    grid = report.normalize_rows(grid)
    order = report.rank_entities(grid)
    return report.reorder(grid, order)


def _agreement_inputs(results, metrics, components, family):
    values_by_component = {}
    for component in components:
        per_metric = {}
        for metric_id in metrics:
            per_dataset = {}
            for result in results:
                if result.error:
                    continue
                source = (
                    result.rep_metrics
                    if family == "representational"
                    else result.stereo_metrics
                )
                mv = source.get(component, {}).get(metric_id)
                if mv is None or not mv.defined:
                    per_dataset[result.name] = None
                elif family == "representational" and metric_id in report.DIVERSITY_VIEW_CONVERTED:
                    per_dataset[result.name] = report.to_bias_form(metric_id, mv.value)
                else:
                    per_dataset[result.name] = mv.value
            per_metric[metric_id] = per_dataset
        values_by_component[component] = per_metric
    return values_by_component


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _metric_cell(mv) -> dict:
    cell = report.cell_json(mv.value, mv.reason)
    if mv.notes:
        cell["notes"] = list(mv.notes)
    return cell


def _dataset_payload(result: DatasetResult, rep_components, stereo_components) -> dict:
    payload = {
        "name": result.name,
        "kind": result.kind,
        "input": result.input,
    }
    if result.error:
        payload["error"] = result.error
        return payload
    components = {}
    for component in rep_components:
        if component not in result.profiles:
            components[component] = {"skipped": result.skipped.get(component, "unavailable")}
            continue
        profile = result.profiles[component]
        entry = {
            "n": profile.n,
            "excluded": profile.excluded,
            "counts": profile.as_mapping(),
            "zero_groups": list(profile.zero_groups),
            "representational": {
                metric_id: _metric_cell(mv)
                for metric_id, mv in result.rep_metrics[component].items()
            },
        }
        if component in result.stereo_metrics and component in stereo_components:
            entry["stereotypical"] = {
                metric_id: _metric_cell(mv)
                for metric_id, mv in result.stereo_metrics[component].items()
            }
            strength = result.strengths.get(component)
            if strength is not None:
                entry["strength"] = {
                    "band": strength.band,
                    "dof": strength.dof,
                    "thresholds": [round(t, 6) for t in strength.thresholds],
                }
        components[component] = entry
    payload["components"] = components
    return payload


def run_analyze(config: RunConfig) -> int:
    """Compute all metrics for every dataset and emit grids and reports."""
    try:
        manifest = load_manifest(config.manifest)
        rep_components, stereo_components = _resolve_components(manifest, config)
    except (FileNotFoundError, ValidationError) as exc:
        print(f"biaslens: {exc}", file=sys.stderr)
        return 2

    rep_metrics = REP_GRID_METRICS
    stereo_metrics = STEREO_GRID_METRICS
    if config.metrics is not None:
        known = set(rep.ALL_METRICS) | set(stereo.ALL_METRICS) | {stereo.CHI_SQUARED}
        unknown = [m for m in config.metrics if m not in known]
        if unknown:
            print(f"biaslens: unknown metrics {unknown}", file=sys.stderr)
            return 2
        rep_metrics = tuple(m for m in rep_metrics if m in config.metrics)
        stereo_metrics = tuple(m for m in stereo_metrics if m in config.metrics)

    load_components = tuple(dict.fromkeys((*rep_components, *stereo_components, LABEL_COMPONENT)))
    results = _compute_results(manifest, load_components, config)
    ok = [r for r in results if not r.error]
    failed = [r for r in results if r.error]

    rep_grid = _build_family_grid(ok, rep_metrics, rep_components, "representational")
    strengths = {}
    for result in ok:
        for component, strength in result.strengths.items():
            strengths[(component, result.name)] = strength
    stereo_grid = _build_family_grid(ok, stereo_metrics, stereo_components, "stereotypical")
    stereo_grid = report.annotate_strength(stereo_grid, strengths)

    agreement_payload = {"representational": None, "stereotypical": None}
    if len(ok) >= 3:
        for family, metrics, components in (
            ("representational", rep_metrics, rep_components),
            ("stereotypical", stereo_metrics, stereo_components),
        ):
            try:
                matrix = agr.metric_agreement(
                    _agreement_inputs(ok, metrics, components, family)
                )
                agreement_payload[family] = report.agreement_payload(matrix)
            except ValueError:
                agreement_payload[family] = None

    local_payload = {}
    for result in ok:
        per_component = {}
        for component in stereo_components:
            matrices = result.local.get(component)
            if not matrices:
                continue
            rho = agr.local_agreement(
                matrices[local_bias.NPMI], matrices[local_bias.DUCHERS_Z]
            )
            per_component[component] = {
                "npmi": report.matrix_payload(matrices[local_bias.NPMI]),
                "z": report.matrix_payload(matrices[local_bias.DUCHERS_Z]),
                "agreement_rho": None if rho is None else round(rho, 6),
            }
        local_payload[result.name] = per_component

    out = config.out
    if "json" in config.formats:
        payload = {
            "schema": schema_to_dict(manifest.schema),
            "threshold_mode": config.threshold_mode,
            "components": {
                "representational": list(rep_components),
                "stereotypical": list(stereo_components),
            },
            "datasets": [
                _dataset_payload(r, load_components, stereo_components)
                for r in results
            ],
            "grids": {
                "representational": report.grid_payload(rep_grid),
                "stereotypical": report.grid_payload(stereo_grid),
            },
            "agreement": agreement_payload,
            "local": local_payload,
            "rankings": {
                "representational": list(rep_grid.datasets),
                "stereotypical": list(stereo_grid.datasets),
            },
            "failures": {r.name: r.error for r in failed},
        }
        _write(out / "report.json", report.emit(payload, "json"))
    for fmt in ("csv", "md"):
        if fmt in config.formats:
            _write(out / f"representational.{fmt}", report.emit(rep_grid, fmt))
            _write(out / f"stereotypical.{fmt}", report.emit(stereo_grid, fmt))
    if "csv" in config.formats:
        ranking_rows = [["family", "rank", "dataset"]]
        for family, grid in (
            ("representational", rep_grid),
            ("stereotypical", stereo_grid),
        ):
            for rank, ds in enumerate(grid.datasets, start=1):
                ranking_rows.append([family, str(rank), ds])
        _write(out / "ranking.csv", report.csv_bytes(ranking_rows))
    if "svg" in config.formats:
        _write(out / "representational.svg", report.emit_heatmap_svg(rep_grid))
        _write(out / "stereotypical.svg", report.emit_heatmap_svg(stereo_grid))
    for result in ok:
        for component in stereo_components:
            table = result.tables.get(component)
            if table is None:
                continue
            base = out / result.name / component
            if "csv" in config.formats:
                _write(base / "table.csv", report.emit(table, "csv"))
            if "json" in config.formats:
                per_component = {
                    "representational": {
                        m: _metric_cell(mv)
                        for m, mv in result.rep_metrics[component].items()
                    },
                    "stereotypical": {
                        m: _metric_cell(mv)
                        for m, mv in result.stereo_metrics[component].items()
                    },
                }
                _write(base / "metrics.json", report.emit(per_component, "json"))

    for result in failed:
        print(f"biaslens: dataset {result.name!r} failed: {result.error}", file=sys.stderr)
    print(f"analyzed {len(ok)} dataset(s) -> {out}")
    print("representational ranking: " + " > ".join(rep_grid.datasets))
    print("stereotypical ranking: " + " > ".join(stereo_grid.datasets))
    return 1 if failed else 0


def run_agreement(config: RunConfig, family: str) -> int:
    """Emit the Spearman agreement matrix for one metric family."""
    try:
        manifest = load_manifest(config.manifest)
        rep_components, stereo_components = _resolve_components(manifest, config)
    except (FileNotFoundError, ValidationError) as exc:
        print(f"biaslens: {exc}", file=sys.stderr)
        return 2
    load_components = tuple(dict.fromkeys((*rep_components, *stereo_components, LABEL_COMPONENT)))
    results = _compute_results(manifest, load_components, config)
    ok = [r for r in results if not r.error]
    if len(ok) < 3:
        print(
            f"biaslens: agreement needs at least 3 loadable datasets, got {len(ok)}",
            file=sys.stderr,
        )
        return 1
    if family == "representational":
        metrics, components = REP_GRID_METRICS, rep_components
    else:
        metrics, components = STEREO_GRID_METRICS, stereo_components
    try:
        matrix = agr.metric_agreement(
            _agreement_inputs(ok, metrics, components, family)
        )
    except ValueError as exc:
        print(f"biaslens: {exc}", file=sys.stderr)
        return 1
    out = config.out
    if "json" in config.formats:
        _write(out / f"agreement_{family}.json", report.emit(matrix, "json"))
    for fmt in ("csv", "md"):
        if fmt in config.formats:
            _write(out / f"agreement_{family}.{fmt}", report.emit(matrix, fmt))
    print(f"agreement over {len(ok)} dataset(s) -> {out}")
    return 0


def run_local(config: RunConfig, dataset: str, component: str, svg: bool) -> int:
    """Emit support counts plus both local bias matrices for one dataset."""
    try:
        manifest = load_manifest(config.manifest)
    except (FileNotFoundError, ValidationError) as exc:
        print(f"biaslens: {exc}", file=sys.stderr)
        return 2
    try:
        entry = manifest.entry(dataset)
    except KeyError:
        known = ", ".join(sorted(d.name for d in manifest.datasets))
        print(f"biaslens: unknown dataset {dataset!r} (have: {known})", file=sys.stderr)
        return 1
    if component not in manifest.schema.component_names:
        print(f"biaslens: unknown component {component!r}", file=sys.stderr)
        return 1
    result = _analyze_dataset(
        entry, (component, LABEL_COMPONENT), manifest.schema, config.threshold_mode
    )
    if result.error:
        print(f"biaslens: dataset {dataset!r} failed: {result.error}", file=sys.stderr)
        return 1
    table = result.tables.get(component)
    if table is None:
        reason = result.skipped.get(component, "component unavailable")
        print(f"biaslens: {dataset!r}/{component!r}: {reason}", file=sys.stderr)
        return 1
    npmi = result.local[component][local_bias.NPMI]
    z = result.local[component][local_bias.DUCHERS_Z]
    rho = agr.local_agreement(npmi, z)
    base = config.out / dataset / component
    _write(base / "support.csv", report.emit(table, "csv"))
    _write(base / "npmi.csv", report.emit(npmi, "csv"))
    _write(base / "z.csv", report.emit(z, "csv"))
    _write(base / "npmi.json", report.emit(npmi, "json"))
    _write(base / "z.json", report.emit(z, "json"))
    summary = {
        "dataset": dataset,
        "component": component,
        "agreement_rho": None if rho is None else round(rho, 6),
        "unrepresented_groups": list(table.unrepresented_groups),
        "unrepresented_labels": list(table.unrepresented_labels),
    }
    _write(base / "local.json", report.emit(summary, "json"))
    if svg:
        _write(base / "support.svg", report.emit_heatmap_svg(table))
        _write(base / "npmi.svg", report.emit_heatmap_svg(npmi))
        _write(base / "z.svg", report.emit_heatmap_svg(z))
    print(f"local bias for {dataset}/{component} -> {base}")
    return 0


def run_synth(seed, groups, classes, n, concentration, sparsity, independent, out) -> int:
    """Export a deterministic synthetic table in the ingest CSV format."""
    try:
        spec = SynthSpec(
            seed=seed,
            groups=groups,
            classes=classes,
            concentration=concentration,
            sparsity=sparsity,
            n=n,
            independent=independent,
        )
        table = random_table(spec)
    except ValidationError as exc:
        print(f"biaslens: {exc}", file=sys.stderr)
        return 2
    out = Path(out)
    _write(out, report.emit(table, "csv"))
    print(f"wrote {out}")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", required=True, help="manifest JSON path")
    parser.add_argument("--out", default="biaslens-out", help="output directory")
    parser.add_argument(
        "--components",
        nargs="+",
        help="components to analyze (default: all schema components plus the label)",
    )
    parser.add_argument(
        "--format",
        default=",".join(ALL_FORMATS),
        help="comma-separated output formats: json,csv,md,svg",
    )
    parser.add_argument(
        "--threshold-mode",
        choices=stereo.THRESHOLD_MODES,
        default=None,
        help="association strength bands (default: $BIASLENS_THRESHOLD_MODE or cohen)",
    )
    parser.add_argument("--jobs", type=int, default=1, help="dataset-level parallelism")


def _config_from_args(args) -> RunConfig:
    mode = args.threshold_mode or os.environ.get("BIASLENS_THRESHOLD_MODE", stereo.COHEN)
    return RunConfig(
        manifest=Path(args.manifest),
        components=tuple(args.components) if args.components else None,
        metrics=tuple(args.metrics) if getattr(args, "metrics", None) else None,
        out=Path(args.out),
        formats=tuple(f.strip() for f in args.format.split(",") if f.strip()),
        threshold_mode=mode,
        jobs=args.jobs,
    )


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="biaslens",
        description="Quantify representational and stereotypical demographic bias in labeled datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="compute all metrics and emit reports")
    _add_common(p_analyze)
    p_analyze.add_argument("--metrics", nargs="+", help="metric ids to include")

    p_agree = sub.add_parser("agreement", help="pairwise metric rank agreement")
    _add_common(p_agree)
    p_agree.add_argument(
        "--family",
        required=True,
        choices=("representational", "stereotypical"),
    )

    p_local = sub.add_parser("local", help="per-subgroup local bias matrices")
    _add_common(p_local)
    p_local.add_argument("--dataset", required=True)
    p_local.add_argument("--component", required=True)
    p_local.add_argument("--svg", action="store_true", help="also render SVG heatmaps")

    p_synth = sub.add_parser("synth", help="export a deterministic synthetic table CSV")
    p_synth.add_argument("--seed", type=int, required=True)
    p_synth.add_argument("--groups", type=int, required=True)
    p_synth.add_argument("--classes", type=int, required=True)
    p_synth.add_argument("--n", type=int, default=1000)
    p_synth.add_argument("--concentration", type=float, default=1.0)
    p_synth.add_argument("--sparsity", type=float, default=0.0)
    p_synth.add_argument("--independent", action="store_true")
    p_synth.add_argument("--out", required=True, help="output CSV file")

    args = parser.parse_args(argv)
    if args.command == "synth":
        return run_synth(
            args.seed,
            args.groups,
            args.classes,
            args.n,
            args.concentration,
            args.sparsity,
            args.independent,
            args.out,
        )
    try:
        config = _config_from_args(args)
    except ValidationError as exc:
        print(f"biaslens: {exc}", file=sys.stderr)
        return 2
    if args.command == "analyze":
        return run_analyze(config)
    if args.command == "agreement":
        return run_agreement(config, args.family)
    return run_local(config, args.dataset, args.component, args.svg)


if __name__ == "__main__":
    sys.exit(main())
