"""Verification reports and the small file writers shared by the scans."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any


@dataclass
class VerificationReport:
    theorem: str
    domain: dict
    violations: list = field(default_factory=list)
    thresholds: dict = field(default_factory=dict)
    checked: int = 0
    indeterminate: int = 0
    notes: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return dumps(self.to_dict())


def _default(obj: Any):
    # numpy scalars and exact integers/fractions
    if hasattr(obj, "item"):
        return obj.item()
    if hasattr(obj, "numerator") and hasattr(obj, "denominator"):
        return f"{obj.numerator}/{obj.denominator}"
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, default=_default) + "\n"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def fmt(value: float) -> str:
    """Fixed, platform-independent float formatting for CSV output."""
    return repr(float(value))


def write_output(data: str | bytes, path: str | Path | None, stdout=None):
    """Write to ``path`` or, when it is ``None``, to ``stdout``."""
    if path is None:
        import sys

        out = stdout or sys.stdout
        if isinstance(data, bytes):
            out.buffer.write(data)
        else:
            out.write(data)
        return
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(path, mode, **({} if mode == "wb" else {"newline": ""})) as fh:
        fh.write(data)
