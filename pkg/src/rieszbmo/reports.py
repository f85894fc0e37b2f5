"""Verification reports and their JSON / CSV serializations."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

__all__ = ["VerificationReport", "emit_profile", "write_report"]


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):  # numpy scalars
        return x.item()
    return x


@dataclass
class VerificationReport:
    """Outcome of one numerical check.

    ``constants`` holds the measured quantities, ``tolerances`` the bounds
    they were compared against.  ``profiles`` holds per-level / per-height
    maps for plotting and ``stages`` the sub-reports of an aggregate check;
    neither is part of the fixed JSON object.
    """

    check: str
    passed: bool
    constants: dict[str, float] = field(default_factory=dict)
    worst: dict = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    profiles: dict[str, dict] = field(default_factory=dict)
    stages: list["VerificationReport"] = field(default_factory=list)

    def __bool__(self):
        return bool(self.passed)

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "pass": bool(self.passed),
            "constants": _jsonable(self.constants),
            "worst": _jsonable(self.worst),
            "tolerances": _jsonable(self.tolerances),
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        """One object, or for aggregate checks an array: stages then the summary."""
        if self.stages:
            payload = [s.to_dict() for s in self.stages] + [self.to_dict()]
        else:
            payload = self.to_dict()
        return json.dumps(payload, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(d["check"], bool(d["pass"]), dict(d["constants"]), dict(d["worst"]),
                   dict(d["tolerances"]), list(d["notes"]))

    def failures(self) -> list[str]:
        out = [n for n in self.notes if n.startswith("FAIL")]
        for s in self.stages:
            out += [f"{s.check}: {m}" for m in s.failures()]
        return out


def write_report(report: VerificationReport, path) -> Path:
    path = Path(path)
    path.write_text(report.to_json() + "\n")
    return path


def _sort_key(k):
    try:
        return (0, float(k), "")
    except (TypeError, ValueError):
        return (1, 0.0, str(k))


def _fmt(v):
    if isinstance(v, float) or hasattr(v, "item"):
        v = float(v)
        return repr(v) if math.isfinite(v) else str(v)
    return str(v)


def _write_csv(path: Path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "value"])
        for k, v in rows:
            w.writerow([k, _fmt(v)])


def emit_profile(report: VerificationReport, path, fmt: str = "csv") -> list[Path]:
    """Write the report's profile maps as ``key,value`` CSV, sorted by key.

    A plain report goes to ``path``; when it carries several profiles they
    are flattened to ``<profile>:<key>`` keys.  An aggregate report treats
    ``path`` as a directory and writes ``<stage>.csv`` per stage.
    """
    if fmt != "csv":
        raise ValueError(f"unsupported profile format {fmt!r}")
    path = Path(path)
    if report.stages:
        path.mkdir(parents=True, exist_ok=True)
        written = []
        for s in report.stages:
            written += emit_profile(s, path / f"{s.check}.csv")
        return written
    if len(report.profiles) == 1:
        (mapping,) = report.profiles.values()
        rows = [(k, mapping[k]) for k in sorted(mapping, key=_sort_key)]
    else:
        # numeric order inside each profile, so level 10 follows level 9
        rows = [(f"{name}:{k}", report.profiles[name][k]) for name in sorted(report.profiles)
                for k in sorted(report.profiles[name], key=_sort_key)]
    _write_csv(path, rows)
    return [path]
