#!/usr/bin/env python3
"""Regenerate the bundled synthetic fixture datasets.

Six datasets over the default schema, chosen to exercise the interesting
paths: a balanced lab set, a single-demographic lab set (undefined
evenness metrics), a stereotyped in-the-wild set, one with missing
demographic values, a sparse table-input set (empty subgroups) and a
near-independent table-input set. Deterministic: rerunning this script
reproduces the same bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from biaslens.core import validate_table
from biaslens.ingest import default_schema
from biaslens.report import emit
from biaslens.synth import SynthSpec, random_sample_rows, random_table

OUT = Path(__file__).resolve().parents[1] / "src" / "biaslens" / "fixtures"
COLUMNS = {"id": "file", "label": "label", "age": "age", "gender": "gender", "race": "race"}


def write_samples(name: str, rows: list[dict[str, str]]) -> None:
    path = OUT / f"{name}.csv"
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=["file", "label", "age", "gender", "race"])
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows)")


def write_tables(name: str, seed: int, schema, sparsity: float, independent: bool, n: int) -> None:
    base = OUT / name
    base.mkdir(parents=True, exist_ok=True)
    for offset, (component, groups) in enumerate(schema.components):
        spec = SynthSpec(
            seed=seed + offset,
            groups=len(groups),
            classes=len(schema.labels),
            concentration=1.2,
            sparsity=sparsity,
            n=n,
            independent=independent,
        )
        table = random_table(spec)
        named = validate_table(
            table.cells, groups=groups, labels=schema.labels, component=component
        )
        path = base / f"{component}.csv"
        path.write_bytes(emit(named, "csv"))
        zero_cells = sum(1 for row in named.cells for c in row if c == 0)
        print(f"wrote {path} (n={named.n}, zero cells={zero_cells})")


def main() -> None:
    schema = default_schema()
    OUT.mkdir(parents=True, exist_ok=True)

    write_samples(
        "lab-uniform",
        random_sample_rows(101, schema, n=420, label_concentration=0.2, association=0.1),
    )

    jaffe_like = random_sample_rows(102, schema, n=150, label_concentration=0.3, association=0.2)
    for row in jaffe_like:
        row["gender"] = "Female"
        row["race"] = "East Asian"
    write_samples("lab-single", jaffe_like)

    write_samples(
        "itw-queries",
        random_sample_rows(103, schema, n=2000, label_concentration=0.8, association=0.6),
    )

    write_samples(
        "itw-missing",
        random_sample_rows(104, schema, n=800, label_concentration=0.5, association=0.3, missing_rate=0.15),
    )

    write_tables("itw-movies", 105, schema, sparsity=0.35, independent=False, n=1500)
    write_tables("other-balanced", 205, schema, sparsity=0.0, independent=True, n=1200)

    manifest = {
        "datasets": [
            {"name": "lab-uniform", "kind": "LAB", "path": "lab-uniform.csv", "input": "samples", "columns": COLUMNS},
            {"name": "lab-single", "kind": "LAB", "path": "lab-single.csv", "input": "samples", "columns": COLUMNS},
            {"name": "itw-queries", "kind": "ITW-I", "path": "itw-queries.csv", "input": "samples", "columns": COLUMNS},
            {"name": "itw-missing", "kind": "ITW-I", "path": "itw-missing.csv", "input": "samples", "columns": COLUMNS},
            {"name": "itw-movies", "kind": "ITW-M", "path": "itw-movies", "input": "table"},
            {"name": "other-balanced", "kind": "OTHER", "path": "other-balanced", "input": "table"},
        ]
    }
    manifest_path = OUT / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {manifest_path}")


if __name__ == "__main__":
    main()
