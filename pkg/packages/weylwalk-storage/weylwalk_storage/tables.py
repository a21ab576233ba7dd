"""
CSV tables with fixed, versioned headers.

Floats are written with repr(), the shortest string that parses back to
the same double, so a table read and re-written is byte-identical.
"""

import csv
import logging
from collections.abc import Iterable, Mapping, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, ValidationError

from weylwalk_core.errors import DataError

logger = logging.getLogger(__name__)

VTABLE_SCHEMA_VERSION = 1
VTABLE_HEADER = (
    "schema_version",
    "k",
    "gaps",
    "v_hat",
    "stderr",
    "method",
    "horizon",
    "law",
    "seed",
)
GAP_SEPARATOR = ";"


class VTableRow(BaseModel):
    """One grid point of a V-table."""

    model_config = ConfigDict(frozen=True)

    k: int
    gaps: tuple[float, ...]
    v_hat: float
    stderr: float
    method: str
    horizon: int
    law: str
    seed: int


def format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


def write_table(
    path: Path,
    fieldnames: Sequence[str],
    rows: Iterable[Mapping[str, Any]],
) -> int:
    """Write rows under a fixed header; missing fields are left empty.

    Returns:
        Number of data rows written.
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_cell(row.get(key)) for key in fieldnames})
            count += 1
    logger.debug(f"Wrote {count} rows to {path}")
    return count


def read_table(path: Path, expected_header: Sequence[str] | None = None) -> list[dict[str, str]]:
    """Read a CSV table, optionally insisting on an exact header."""
    if not path.exists():
        raise FileNotFoundError(f"Table not found: {path}")
    with path.open("r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        header = tuple(reader.fieldnames or ())
        if expected_header is not None and header != tuple(expected_header):
            raise DataError(f"{path}: header {header} does not match {tuple(expected_header)}")
        return list(reader)


def write_vtable(path: Path, rows: Iterable[VTableRow]) -> int:
    return write_table(
        path,
        VTABLE_HEADER,
        (
            {
                "schema_version": VTABLE_SCHEMA_VERSION,
                **row.model_dump(),
                "gaps": GAP_SEPARATOR.join(repr(float(g)) for g in row.gaps),
            }
            for row in rows
        ),
    )


def read_vtable(path: Path) -> list[VTableRow]:
    rows = []
    for line, raw in enumerate(read_table(path, VTABLE_HEADER), start=2):
        if raw["schema_version"] != str(VTABLE_SCHEMA_VERSION):
            raise DataError(
                f"{path}:{line}: unsupported schema_version {raw['schema_version']!r}"
            )
        try:
            gaps = tuple(float(g) for g in raw["gaps"].split(GAP_SEPARATOR))
            rows.append(
                VTableRow(
                    k=raw["k"],
                    gaps=gaps,
                    v_hat=raw["v_hat"],
                    stderr=raw["stderr"],
                    method=raw["method"],
                    horizon=raw["horizon"],
                    law=raw["law"],
                    seed=raw["seed"],
                )
            )
        except (ValueError, ValidationError) as e:
            raise DataError(f"{path}:{line}: malformed V-table row: {e}") from e
        if len(gaps) != rows[-1].k - 1:
            raise DataError(f"{path}:{line}: expected {rows[-1].k - 1} gaps, got {len(gaps)}")
    return rows
