import csv
import dataclasses
import io
import json
import os
import tempfile
from enum import Enum
from pathlib import Path

import numpy as np

from heckezeros.models import ZeroRecord


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write text to path via a temp file in the same directory and os.replace."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def to_jsonable(value):
    """Plain JSON types for report objects (dataclasses, enums, complex, numpy scalars)."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if np.isfinite(value) else str(value)
    return value


def write_json(path: str | Path, payload) -> Path:
    text = json.dumps(to_jsonable(payload), sort_keys=True, indent=2)
    return atomic_write_text(path, text + "\n")


def write_csv(path: str | Path, rows: list[dict], columns: list[str]) -> Path:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _cell(v) for k, v in to_jsonable(row).items()})
    return atomic_write_text(path, buf.getvalue())


def _cell(value):
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return value


def format_zero_list(records: list[ZeroRecord]) -> str:
    """One line per zero: m re im residual method."""
    lines = [
        f"{r.m} {r.location.real!r} {r.location.imag!r} {r.residual:.3e} {r.method.value}"
        for r in records
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def write_zero_list(path: str | Path, records: list[ZeroRecord]) -> Path:
    return atomic_write_text(path, format_zero_list(records))


def generate_text_summary(checks: dict) -> str:
    """Plain-text pass/fail summary of a verification run."""
    lines = ["VERIFICATION SUMMARY", "=" * 40, ""]
    for name in sorted(checks):
        check = checks[name]
        status = "PASS" if check.get("passed") else "FAIL"
        lines.append(f"{status}  {name}: {check.get('detail', '')}")
    passed = sum(1 for c in checks.values() if c.get("passed"))
    lines.append("")
    lines.append(f"{passed}/{len(checks)} checks passed")
    lines.append("=" * 40)
    return "\n".join(lines)
