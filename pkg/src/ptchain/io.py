"""Deterministic serialization: delimited text and JSON documents.

Floats are written with the shortest representation that round-trips
exactly, so identical invocations produce byte-identical files and nothing
is lost on re-reading.  Every file embeds the full invocation and the
library version (as '#' comment lines in delimited files, as a "meta"
object in JSON documents).
"""

from __future__ import annotations

import json
import shlex
from pathlib import Path


def format_value(value) -> str:
    """Shortest round-trip text for a cell: floats via repr, None empty."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    try:
        import numpy as np
        if isinstance(value, np.floating):
            return repr(float(value))
        if isinstance(value, np.integer):
            return str(int(value))
    except ImportError:  # pragma: no cover
        pass
    return str(value)


def meta_lines(version: str, invocation: str, notes=()) -> list:
    lines = [f"# ptchain {version}", f"# invocation: {invocation}"]
    lines.extend(f"# note: {n}" for n in notes)
    return lines


def invocation_string(argv) -> str:
    return " ".join(["ptchain"] + [shlex.quote(str(a)) for a in argv])


def write_delimited(path, header: list, columns: list, rows) -> None:
    """Write '#'-commented header lines, a column-name row, then data rows."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for line in header:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")


def read_delimited(path):
    """Read back a delimited file written by this module: (columns, rows of
    strings); comment lines are skipped."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines()
             if ln and not ln.startswith("#")]
    columns = lines[0].split(",")
    return columns, [ln.split(",") for ln in lines[1:]]


def write_json_document(path, document: dict) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(document, fh, indent=2, allow_nan=True)
        fh.write("\n")
