"""Deterministic dataset writers.

Every output file starts with '#'-prefixed metadata lines (config hash, seed,
package version) so a run is reproducible from the file alone.  Floats are
written with ``repr`` (shortest round-trip form), which makes repeated runs
byte-identical for identical (config, seed).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


def config_hash(config: Mapping) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def metadata_lines(meta: Mapping) -> list[str]:
    return [f"# {key}: {meta[key]}" for key in meta]


def write_csv(
    path: Path | str,
    meta: Mapping,
    columns: Sequence[str],
    rows: Iterable[Sequence],
) -> Path:
    path = Path(path)
    lines = metadata_lines(meta)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def write_json(path: Path | str, meta: Mapping, payload: Mapping) -> Path:
    path = Path(path)
    doc = {"_meta": dict(meta)}
    doc.update(payload)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path
