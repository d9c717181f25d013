"""Bundled synthetic datasets for end-to-end runs and the test suite.

Six deterministic datasets over the default schema, mixing per-sample and
precomputed-table inputs. Regenerate with tools/make_fixtures.py.
"""

from pathlib import Path

_HERE = Path(__file__).resolve().parent


def bundled_manifest_path() -> Path:
    """Path of the bundled six-dataset manifest."""
    return _HERE / "manifest.json"
