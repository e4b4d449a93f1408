"""Report envelope shared by all CLI commands and its JSON schema."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Optional

import numpy as np

from .algebra import CONDITION_MISPRINT_NOTE, METRIC_READING_NOTE

SCHEMA_VERSION = "1.0"


def _plain(obj):
    """Convert numpy scalars/arrays (recursively) into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


@dataclass
class Report:
    command: str
    config: dict
    results: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    warnings: list = field(default_factory=lambda: [METRIC_READING_NOTE, CONDITION_MISPRINT_NOTE])
    ok: bool = True
    figures: list = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    table: Optional[list] = None  # rows for delimited output, not serialised

    def payload(self) -> dict:
        """Everything except timing; identical for identical config and seed."""
        return _plain({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "certificates": self.certificates,
            "warnings": self.warnings,
            "figures": self.figures,
            "ok": self.ok,
        })

    def to_dict(self) -> dict:
        d = self.payload()
        d["timing"] = _plain(self.timing)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        rows = self.table if self.table is not None else [
            {"key": k, "value": v} for k, v in flatten(self.payload()["results"]).items()
        ]
        if not rows:
            return ""
        buf = io.StringIO()
        fields = list(rows[0].keys())
        for r in rows[1:]:
            fields += [k for k in r if k not in fields]
        w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(_plain(r))
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{self.command}: {'ok' if self.ok else 'FAILED'}"]
        for k, v in flatten(self.payload()["results"]).items():
            lines.append(f"  {k}: {v}")
        for c in self.certificates:
            lines.append(f"  certificate {c['subject']}: {c['status']} ({c.get('proof', '')})")
        for f in self.figures:
            lines.append(f"  figure: {f}")
        for w in self.warnings:
            lines.append(f"  note: {w}")
        return "\n".join(lines) + "\n"


def flatten(d: Any, prefix: str = "") -> dict:
    out = {}
    if isinstance(d, dict):
        for k, v in d.items():
            out.update(flatten(v, f"{prefix}.{k}" if prefix else str(k)))
    elif isinstance(d, list) and d and all(isinstance(x, (dict, list)) for x in d):
        for i, v in enumerate(d):
            out.update(flatten(v, f"{prefix}[{i}]"))
    else:
        out[prefix] = json.dumps(d) if isinstance(d, list) else d
    return out


def load_schema() -> dict:
    text = resources.files("homgeo").joinpath("schemas/report-v1.json").read_text()
    return json.loads(text)


def validate(doc: dict) -> None:
    """Raise jsonschema.ValidationError when ``doc`` does not match the schema."""
    import jsonschema

    jsonschema.validate(doc, load_schema())
