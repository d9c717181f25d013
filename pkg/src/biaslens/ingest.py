"""Loaders: dataset manifests, per-sample CSVs and precomputed table CSVs.

Missing demographic values are excluded per component rather than pooled
into an artificial "unknown" group; the exclusion counts travel with the
profiles and tables so coverage stays visible. CSV dialect is plain
comma-separated UTF-8 with a header row.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .core import (
    ContingencyTable,
    DemographicSchema,
    PopulationProfile,
    ValidationError,
    validate_table,
)

SOURCE_KINDS = ("LAB", "ITW-I", "ITW-M", "OTHER")
INPUT_KINDS = ("samples", "table")
LABEL_COMPONENT = "label"
MISSING = None


def default_schema() -> DemographicSchema:
    """The bundled apparent-demographics schema (7 races, 2 genders, 9 age bins)."""
    raw = (
        resources.files("biaslens")
        .joinpath("data/fairface_schema.json")
        .read_text(encoding="utf-8")
    )
    return schema_from_dict(json.loads(raw))


def schema_from_dict(raw: Mapping) -> DemographicSchema:
    try:
        components = tuple(
            (entry["name"], tuple(entry["groups"])) for entry in raw["components"]
        )
        labels = tuple(raw["labels"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed schema: {exc}") from exc
    return DemographicSchema(components=components, labels=labels)


def schema_to_dict(schema: DemographicSchema) -> dict:
    return {
        "components": [
            {"name": name, "groups": list(groups)} for name, groups in schema.components
        ],
        "labels": list(schema.labels),
    }


@dataclass(frozen=True)
class DatasetEntry:
    """One manifest entry; path is resolved against the manifest location."""

    name: str
    kind: str
    path: Path
    input: str
    columns: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class DatasetManifest:
    datasets: tuple[DatasetEntry, ...]
    schema: DemographicSchema

    def entry(self, name: str) -> DatasetEntry:
        for ds in self.datasets:
            if ds.name == name:
                return ds
        raise KeyError(name)


@dataclass(frozen=True)
class SampleRecord:
    """One annotated sample: a label plus one group value per component
    (None marks a missing demographic value)."""

    sample_id: str
    label: str
    groups: Mapping[str, str | None]


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse and validate a manifest JSON file."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"manifest not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"manifest {path} is not valid JSON: {exc}") from exc
    schema = (
        schema_from_dict(raw["schema"]) if "schema" in raw else default_schema()
    )
    entries = []
    seen = set()
    for ds in raw.get("datasets", []):
        for key in ("name", "kind", "path", "input"):
            if key not in ds:
                raise ValidationError(f"manifest entry missing {key!r}: {ds}")
        name = ds["name"]
        if name in seen:
            raise ValidationError(f"duplicate dataset name {name!r}")
        seen.add(name)
        if ds["kind"] not in SOURCE_KINDS:
            raise ValidationError(
                f"dataset {name!r}: unknown source kind {ds['kind']!r}"
            )
        if ds["input"] not in INPUT_KINDS:
            raise ValidationError(
                f"dataset {name!r}: unknown input kind {ds['input']!r}"
            )
        columns = ds.get("columns", {})
        for col_key, col_name in columns.items():
            if not col_name:
                raise ValidationError(f"dataset {name!r}: empty column for {col_key!r}")
        entries.append(
            DatasetEntry(
                name=name,
                kind=ds["kind"],
                path=(path.parent / ds["path"]).resolve(),
                input=ds["input"],
                columns=dict(columns),
            )
        )
    if not entries:
        raise ValidationError(f"manifest {path} declares no datasets")
    return DatasetManifest(datasets=tuple(entries), schema=schema)


def load_sample_records(
    path: str | Path, columns: Mapping[str, str], schema: DemographicSchema
) -> list[SampleRecord]:
    """Read one record per CSV data row.

    Rows carrying an out-of-vocabulary label or group value are rejected
    with their line number; empty demographic cells become missing values.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"sample CSV not found: {path}")
    if LABEL_COMPONENT not in columns:
        raise ValidationError(f"{path}: column mapping lacks 'label'")
    label_vocab = set(schema.labels)
    vocab = {name: set(groups) for name, groups in schema.components}
    mapped = [name for name in schema.component_names if name in columns]
    records: list[SampleRecord] = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise ValidationError(f"{path}: missing header row")
        header = set(reader.fieldnames)
        id_column = columns.get("id")
        mapped_columns = [columns[key] for key in (LABEL_COMPONENT, *mapped)]
        if id_column:
            mapped_columns.append(id_column)
        for column in mapped_columns:
            if column not in header:
                raise ValidationError(f"{path}: mapped column {column!r} not in header")
        for line, row in enumerate(reader, start=2):
            label = (row.get(columns[LABEL_COMPONENT]) or "").strip()
            if label not in label_vocab:
                raise ValidationError(
                    f"{path}:{line}: label {label!r} not in vocabulary"
                )
            groups: dict[str, str | None] = {}
            for name in mapped:
                value = (row.get(columns[name]) or "").strip()
                if not value:
                    groups[name] = MISSING
                elif value in vocab[name]:
                    groups[name] = value
                else:
                    raise ValidationError(
                        f"{path}:{line}: {name} value {value!r} not in vocabulary"
                    )
            sample_id = (row.get(id_column) or "").strip() if id_column else ""
            records.append(
                SampleRecord(
                    sample_id=sample_id or f"row{line}", label=label, groups=groups
                )
            )
    if not records:
        raise ValidationError(f"{path}: no data rows")
    return records


def _component_values(
    records: Sequence[SampleRecord], component: str
) -> tuple[list[str], int]:
    """Non-missing values of a component (or the label), plus exclusion count."""
    if component == LABEL_COMPONENT:
        return [r.label for r in records], 0
    values = []
    excluded = 0
    for r in records:
        value = r.groups.get(component, MISSING)
        if value is MISSING:
            excluded += 1
        else:
            values.append(value)
    return values, excluded


def _vocabulary(schema: DemographicSchema, component: str) -> tuple[str, ...]:
    if component == LABEL_COMPONENT:
        return schema.labels
    return schema.groups_for(component)


def build_profile(
    records: Sequence[SampleRecord], component: str, schema: DemographicSchema
) -> PopulationProfile:
    """Counts over the full component vocabulary (zero-filled).

    Records missing this component are excluded from n; the exclusion
    count is kept on the profile.
    """
    vocabulary = _vocabulary(schema, component)
    values, excluded = _component_values(records, component)
    if not values:
        raise ValidationError(f"all records missing component {component!r}")
    counts = {g: 0 for g in vocabulary}
    for value in values:
        counts[value] += 1
    return PopulationProfile(
        component=component,
        groups=vocabulary,
        counts=tuple(counts[g] for g in vocabulary),
        n=len(values),
        excluded=excluded,
    )


def build_contingency(
    records: Sequence[SampleRecord], component: str, schema: DemographicSchema
) -> ContingencyTable:
    """Joint (group, label) counts over the full vocabularies, zero-filled."""
    if component == LABEL_COMPONENT:
        raise ValidationError("contingency tables pair a demographic component with the label")
    vocabulary = schema.groups_for(component)
    row_index = {g: i for i, g in enumerate(vocabulary)}
    col_index = {y: j for j, y in enumerate(schema.labels)}
    cells = [[0] * len(schema.labels) for _ in vocabulary]
    excluded = 0
    kept = 0
    for r in records:
        value = r.groups.get(component, MISSING)
        if value is MISSING:
            excluded += 1
            continue
        cells[row_index[value]][col_index[r.label]] += 1
        kept += 1
    if kept == 0:
        raise ValidationError(f"all records missing component {component!r}")
    return ContingencyTable(
        component=component,
        groups=vocabulary,
        labels=schema.labels,
        cells=tuple(tuple(row) for row in cells),
        n=kept,
        excluded=excluded,
    )


def load_table_csv(path: str | Path, component: str = "") -> ContingencyTable:
    """Read a group x class integer matrix CSV.

    Layout: header row names the classes (first header cell is ignored),
    each data row starts with the group name. Non-integer or negative
    cells are rejected.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"table CSV not found: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if len(rows) < 2 or len(rows[0]) < 2:
        raise ValidationError(f"{path}: need a header row and at least one data row")
    labels = [c.strip() for c in rows[0][1:]]
    groups = []
    cells = []
    width = len(labels)
    for line, row in enumerate(rows[1:], start=2):
        if len(row) != width + 1:
            raise ValidationError(f"{path}:{line}: ragged row")
        groups.append(row[0].strip())
        parsed = []
        for raw in row[1:]:
            text = raw.strip()
            try:
                value = int(text)
            except ValueError as exc:
                raise ValidationError(
                    f"{path}:{line}: cell {text!r} is not an integer"
                ) from exc
            if value < 0:
                raise ValidationError(f"{path}:{line}: negative cell {value}")
            parsed.append(value)
        cells.append(parsed)
    return validate_table(
        cells, groups=groups, labels=labels, component=component or path.stem
    )
