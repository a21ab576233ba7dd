"""
weylwalk storage - CSV tables, manifests and path dumps.
"""

from .artifacts import ArtifactWriter, read_manifest, run_id, utc_now
from .tables import (
    VTABLE_HEADER,
    VTABLE_SCHEMA_VERSION,
    VTableRow,
    read_table,
    read_vtable,
    write_table,
    write_vtable,
)

__all__ = [
    # Artifacts
    "ArtifactWriter",
    "read_manifest",
    "run_id",
    "utc_now",
    # Tables
    "VTABLE_HEADER",
    "VTABLE_SCHEMA_VERSION",
    "VTableRow",
    "read_table",
    "read_vtable",
    "write_table",
    "write_vtable",
]
