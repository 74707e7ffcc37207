"""Tabular results, CSV export, and run manifests.

Every run writes its data file plus a JSON manifest (resolved parameters,
tool version, seed, wall time) so the output is reproducible from the
manifest alone.  Floats are emitted with 17 significant digits.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core import SystemParams

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SweepResult:
    """Named columns of equal length plus provenance metadata."""

    columns: dict
    schema_version: int = SCHEMA_VERSION
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        lengths = {name: len(col) for name, col in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise ValueError(f"column lengths differ: {lengths}")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def header(self) -> str:
        return ",".join(self.columns)


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(result: SweepResult, path, comments: list[str] | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(result.columns)
    cols = [np.asarray(result.columns[name]) for name in names]
    with open(path, "w") as fh:
        for line in comments or []:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        for i in range(result.n_rows):
            fh.write(",".join(format_value(col[i]) for col in cols) + "\n")
    return path


def read_csv_header(path) -> str:
    """First non-comment line of an exported CSV (the column header)."""
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                return line.rstrip("\n")
    return ""


def build_manifest(
    command: str,
    params: SystemParams,
    overrides: list[str] | None = None,
    seed: int | None = None,
    extra: dict | None = None,
) -> dict:
    manifest = {
        "tool": "qom-sense",
        "version": __version__,
        "command": command,
        "params": params.to_experiment(),
        "overrides": list(overrides or []),
        "seed": seed,
        "schema_version": SCHEMA_VERSION,
    }
    if extra:
        manifest.update(extra)
    return manifest


def write_manifest(manifest: dict, path, wall_time_s: float | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = dict(manifest)
    payload["wall_time_s"] = wall_time_s if wall_time_s is not None else 0.0
    payload["written_at_unix"] = time.time()
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
