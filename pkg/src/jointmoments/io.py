"""CSV and JSON writers with provenance.

CSV files start with ``#`` comment lines (package version, seed, spec
echo), then a header row and data rows; floats are written with 17
significant digits so they round-trip exactly.  JSON documents are one
object with ``spec``, ``result`` and ``diagnostics`` keys.
"""

from __future__ import annotations

import csv
import io as _io
import json
import math
import sys
from fractions import Fraction
from importlib import metadata
from pathlib import Path
from typing import Any, Iterable, Mapping, TextIO

import numpy as np

__all__ = [
    "format_value",
    "package_version",
    "provenance",
    "read_csv",
    "read_json",
    "to_jsonable",
    "write_csv",
    "write_json",
    "write_samples",
]


def package_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover - running from a source tree
        return "0+unknown"


def provenance(seed: int | None = None, spec: Mapping | None = None, command: str | None = None) -> dict:
    """Provenance record echoed into every output."""
    out: dict = {"package": "jointmoments", "version": package_version()}
    if command is not None:
        out["command"] = command
    out["seed"] = seed
    if spec is not None:
        out["spec"] = to_jsonable(spec)
    return out


def format_value(v: Any) -> str:
    """Render a CSV cell; floats use 17 significant digits."""
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, Fraction):
        return format_value(float(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, complex):
        return f"{format(v.real, '.17g')}{format(v.imag, '+.17g')}j"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (list, tuple, dict)):
        return json.dumps(to_jsonable(v), separators=(",", ":"))
    return str(v)


def to_jsonable(obj: Any) -> Any:
    """Convert results to JSON-compatible values (non-finite floats become ``None``)."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, Fraction):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return to_jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "value") and hasattr(obj, "name"):  # enums
        return obj.value
    return obj


def _open(dest: str | Path | TextIO | None):
    if dest is None or dest == "-":
        return sys.stdout, False
    if isinstance(dest, (str, Path)):
        return open(dest, "w", newline="", encoding="utf-8"), True
    return dest, False


def write_csv(rows: Iterable[Mapping], dest=None, meta: Mapping | None = None) -> None:
    """Write dict rows as CSV with ``#`` provenance lines first."""
    rows = list(rows)
    header: list[str] = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    fh, close = _open(dest)
    try:
        for k, v in (meta or {}).items():
            text = v if isinstance(v, str) else json.dumps(to_jsonable(v), separators=(",", ":"))
            fh.write(f"# {k}: {text}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([format_value(r.get(k)) for k in header])
    finally:
        if close:
            fh.close()


def read_csv(src) -> tuple[dict, list[dict]]:
    """Parse a file written by :func:`write_csv`; returns ``(meta, rows)`` with string cells."""
    text = Path(src).read_text(encoding="utf-8") if isinstance(src, (str, Path)) else src.read()
    meta: dict = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition(": ")
            try:
                meta[k] = json.loads(v)
            except json.JSONDecodeError:
                meta[k] = v
        else:
            body.append(line)
    reader = csv.DictReader(_io.StringIO("\n".join(body)))
    return meta, list(reader)


def write_json(spec: Any, result: Any, diagnostics: Any = None, dest=None) -> None:
    """Write ``{"spec", "result", "diagnostics"}`` as one JSON object."""
    doc = {"spec": to_jsonable(spec), "result": to_jsonable(result), "diagnostics": to_jsonable(diagnostics or {})}
    fh, close = _open(dest)
    try:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")
    finally:
        if close:
            fh.close()


def read_json(src) -> dict:
    text = Path(src).read_text(encoding="utf-8") if isinstance(src, (str, Path)) else src.read()
    return json.loads(text)


def write_samples(points: np.ndarray, path: str | Path, spec: Any, seed: int | None, diagnostics: Any = None) -> Path:
    """Write draws as CSV (one row per draw) plus a ``<path>.json`` sidecar.

    Returns the sidecar path.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    names = [f"x{i + 1}" for i in range(points.shape[1])]
    meta = provenance(seed, to_jsonable(spec))
    write_csv(({n: v for n, v in zip(names, row)} for row in points), path, meta)
    sidecar = Path(str(path) + ".json")
    write_json(spec, {"n_draws": points.shape[0], "columns": names, "seed": seed}, dict(diagnostics or {}, provenance=meta), sidecar)
    return sidecar
