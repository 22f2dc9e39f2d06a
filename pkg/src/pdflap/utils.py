"""Configuration lookup, file I/O and report formatting utilities."""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path
from typing import Optional

from .errors import InputError, ValidationError
from .ingest import ElectronegativityTable
from .schemas import Report, format_value

# ---------------------------------------------------------------------------
# Config paths
# ---------------------------------------------------------------------------

CONFIG_DIR = Path(os.environ.get(
    "PDFLAP_CONFIG",
    Path.home() / ".config" / "pdflap",
))

CSV_HEADER = ["dim", "a", "b", "betti", "lambda_min_nonzero", "n_eigenvalues"]


# ---------------------------------------------------------------------------
# Electronegativity table
# ---------------------------------------------------------------------------

def load_electronegativity(path: Optional[str | Path] = None) -> ElectronegativityTable:
    """Pauling table extended by the first JSON override file found.

    Lookup order:
      1. Explicit *path* argument
      2. ``~/.config/pdflap/electronegativity.json``

    Raises:
        InputError: if an explicit *path* does not exist.
        ValidationError: if the file is not a JSON object of numbers.
    """
    candidates: list[Path] = []
    if path:
        if not Path(path).is_file():
            raise InputError(f"Electronegativity file not found: {path}")
        candidates.append(Path(path))
    candidates.append(CONFIG_DIR / "electronegativity.json")

    table = ElectronegativityTable.pauling()
    for p in candidates:
        if p.is_file():
            with open(p, encoding="utf-8") as f:
                try:
                    data = json.load(f)
                except json.JSONDecodeError as e:
                    raise ValidationError(f"{p}: invalid JSON ({e}).") from e
            if not isinstance(data, dict):
                raise ValidationError(f"{p}: expected a JSON object of element values.")
            try:
                return table.merged({str(k): float(v) for k, v in data.items()})
            except (TypeError, ValueError):
                raise ValidationError(f"{p}: electronegativity values must be numbers.") from None
    return table


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

def read_input(path: str | Path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot read input '{path}': {e.strerror or e}") from e


def write_output(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise InputError(f"Cannot write '{path}': {e.strerror or e}") from e


def ensure_dir(path: str | Path) -> Path:
    directory = Path(path)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise InputError(f"Cannot create directory '{path}': {e.strerror or e}") from e
    return directory


# ---------------------------------------------------------------------------
# Output formatters
# ---------------------------------------------------------------------------

def emit_csv(report: Report) -> str:
    """One row per record; an empty report gives the header only."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in report.records:
        writer.writerow([
            r.k,
            format_value(r.a),
            format_value(r.b),
            r.betti,
            "" if r.lambda_min_nonzero is None else repr(r.lambda_min_nonzero),
            r.n_eigenvalues,
        ])
    return buf.getvalue()


def emit_json(report: Report) -> str:
    """Full eigenvalue lists plus provenance, with stable key order."""
    return json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def report_from_json(text: str) -> Report:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"Report is not valid JSON: {e}") from e
    return Report.from_dict(data)
