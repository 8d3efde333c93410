"""Machine-readable run reports.

Reports are deterministic for a fixed (config, seed): records are sorted, the
JSON serializer sorts keys, and timings are only included when explicitly
requested, so default reports are byte-identical across runs.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

TOOL = "qgalilei"
VERSION = "0.1.0"


@dataclass
class CheckRecord:
    case: int
    side: str
    name: str
    status: str                  # pass | fail | skip | documented
    mode: str = ""
    degree: int | None = None
    order: int | None = None
    instantiation: str | None = None
    residual: str | None = None
    detail: str | None = None
    timing_ms: int | None = None

    def sort_key(self):
        return (self.side, self.case, self.instantiation or "", self.name)


@dataclass
class Report:
    command: str
    config: dict
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def finalize(self):
        self.checks.sort(key=CheckRecord.sort_key)
        return self

    @property
    def counts(self):
        out = {"total": len(self.checks), "pass": 0, "fail": 0, "skip": 0,
               "documented": 0}
        for c in self.checks:
            out[c.status] = out.get(c.status, 0) + 1
        return out

    @property
    def failed(self):
        return any(c.status == "fail" for c in self.checks)

    def to_dict(self, timings=False):
        checks = []
        for c in self.checks:
            d = asdict(c)
            if not timings:
                d.pop("timing_ms")
            checks.append(d)
        return {
            "tool": TOOL,
            "version": VERSION,
            "command": self.command,
            "config": self.config,
            "checks": checks,
            "summary": self.counts,
            "notes": list(self.notes),
        }

    def to_json(self, timings=False) -> str:
        return json.dumps(self.to_dict(timings), sort_keys=True, indent=2) + "\n"

    def to_text(self, timings=False) -> str:
        lines = [f"{TOOL} {VERSION} :: {self.command}"]
        cfg = " ".join(f"{k}={v}" for k, v in sorted(self.config.items()))
        lines.append(f"config: {cfg}")
        for c in self.checks:
            head = f"[{c.status.upper():>10}] {c.side}{c.case:02d} {c.name}"
            if c.instantiation:
                head += f"  ({c.instantiation})"
            if timings and c.timing_ms is not None:
                head += f"  {c.timing_ms}ms"
            lines.append(head)
            if c.residual:
                lines.append(f"             residual: {c.residual}")
            if c.detail:
                lines.append(f"             note: {c.detail}")
        s = self.counts
        lines.append(
            f"summary: {s['total']} checks, {s['pass']} pass, {s['fail']} fail, "
            f"{s['skip']} skip, {s['documented']} documented")
        for n in self.notes:
            lines.append(f"note: {n}")
        return "\n".join(lines) + "\n"


REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "title": "qgalilei run report",
    "type": "object",
    "required": ["tool", "version", "command", "config", "checks", "summary"],
    "properties": {
        "tool": {"const": "qgalilei"},
        "version": {"type": "string"},
        "command": {"enum": ["verify", "derive", "pair"]},
        "config": {"type": "object"},
        "notes": {"type": "array", "items": {"type": "string"}},
        "checks": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["case", "side", "name", "status"],
                "properties": {
                    "case": {"type": "integer", "minimum": 0, "maximum": 16},
                    "side": {"enum": ["group", "dual"]},
                    "name": {"type": "string"},
                    "status": {"enum": ["pass", "fail", "skip", "documented"]},
                    "mode": {"type": "string"},
                    "degree": {"type": ["integer", "null"]},
                    "order": {"type": ["integer", "null"]},
                    "instantiation": {"type": ["string", "null"]},
                    "residual": {"type": ["string", "null"]},
                    "detail": {"type": ["string", "null"]},
                    "timing_ms": {"type": ["integer", "null"]},
                },
                "additionalProperties": False,
            },
        },
        "summary": {
            "type": "object",
            "required": ["total", "pass", "fail"],
            "properties": {
                "total": {"type": "integer"},
                "pass": {"type": "integer"},
                "fail": {"type": "integer"},
                "skip": {"type": "integer"},
                "documented": {"type": "integer"},
            },
        },
    },
    "additionalProperties": False,
}
