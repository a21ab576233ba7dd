"""
Artifact directory for one experiment run.

Layout under the output directory:
    manifest.jsonl         one JSON object per line, appended as the run goes
    <name>.csv             result tables
    paths/<name>.csv.gz    particle path dumps

Only manifest lines carry timestamps; every other file is a pure function
of the configuration.
"""

import gzip
import hashlib
import json
import logging
from collections.abc import Iterable, Mapping, Sequence
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from .tables import format_cell, write_table

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
PATH_DUMP_DIR = "paths"


def utc_now() -> datetime:
    """Get current UTC timestamp."""
    return datetime.now(timezone.utc)


def run_id(config_json: str) -> str:
    """Stable identifier of a configuration (first 16 hex digits of its SHA-256)."""
    return hashlib.sha256(config_json.encode("utf-8")).hexdigest()[:16]


def table_path(out_dir: Path, name: str) -> Path:
    return out_dir / f"{name}.csv"


def path_dump_path(out_dir: Path, name: str) -> Path:
    return out_dir / PATH_DUMP_DIR / f"{name}.csv.gz"


class ArtifactWriter:
    """Writes the tables, dumps and manifest of one run."""

    def __init__(self, out_dir: Path, run: str):
        self.out_dir = Path(out_dir)
        self.run = run
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.written: list[Path] = []

    @property
    def manifest_path(self) -> Path:
        return self.out_dir / MANIFEST_NAME

    def table(
        self,
        name: str,
        fieldnames: Sequence[str],
        rows: Iterable[Mapping[str, Any]],
    ) -> Path:
        """Write a result table and record it in the manifest."""
        path = table_path(self.out_dir, name)
        count = write_table(path, fieldnames, rows)
        self.written.append(path)
        self.record("table", name=name, file=path.name, rows=count)
        return path

    def path_dump(
        self,
        name: str,
        steps: Sequence[tuple[int, np.ndarray, np.ndarray]],
    ) -> Path:
        """Gzip CSV with one row per (step, particle).

        Args:
            name: File stem.
            steps: (step index, positions of shape (count, k), weights) per step.
        """
        path = path_dump_path(self.out_dir, name)
        path.parent.mkdir(parents=True, exist_ok=True)
        rows = 0
        k = steps[0][1].shape[1] if steps else 0
        header = ["step", "particle", *(f"x{j + 1}" for j in range(k)), "weight"]
        # mtime=0 keeps the gzip header deterministic
        with open(path, "wb") as raw, gzip.GzipFile(fileobj=raw, mode="wb", mtime=0) as gz:
            gz.write((",".join(header) + "\n").encode("utf-8"))
            for step, positions, weights in steps:
                for i, (position, weight) in enumerate(zip(positions, weights)):
                    cells = [str(step), str(i), *(format_cell(float(c)) for c in position), format_cell(float(weight))]
                    gz.write((",".join(cells) + "\n").encode("utf-8"))
                    rows += 1
        self.written.append(path)
        self.record("path_dump", name=name, file=str(path.relative_to(self.out_dir)), rows=rows)
        return path

    def record(self, event: str, **fields: Any) -> None:
        """Append one manifest line; flushed immediately."""
        entry = {"timestamp": utc_now().isoformat(), "run_id": self.run, "event": event, **fields}
        with self.manifest_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(entry, sort_keys=True, default=str) + "\n")


def read_manifest(path: Path) -> list[dict[str, Any]]:
    if not path.exists():
        raise FileNotFoundError(f"Manifest not found: {path}")
    with path.open("r", encoding="utf-8") as f:
        return [json.loads(line) for line in f if line.strip()]
