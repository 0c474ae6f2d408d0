"""Machine-readable check reports."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction

from .rational import format_rational

PASS, FAIL = "pass", "fail"


def _plain(value):
    """JSON-ready copy: Fractions become canonical strings, sets become sorted lists."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item"):
        return _plain(value.item())
    return str(value)


@dataclass
class Check:
    name: str
    anchor: str
    status: str
    witness: object = None
    numbers: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        out = {"name": self.name, "paper_anchor": self.anchor, "status": self.status,
               "numbers": _plain(self.numbers)}
        if self.witness is not None:
            out["witness"] = _plain(self.witness)
        return out


def check(name: str, anchor: str, ok: bool, witness=None, **numbers) -> Check:
    return Check(name, anchor, PASS if ok else FAIL, None if ok else witness, numbers)


@dataclass
class Report:
    command: str
    inputs_digest: str = ""
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_status(self) -> int:
        return 0 if self.ok else 1

    def add(self, c: Check) -> Check:
        self.checks.append(c)
        return c

    def extend(self, other: "Report"):
        self.checks.extend(other.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "checks": [c.to_dict() for c in self.checks],
            "exit_status": self.exit_status,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Report":
        checks = [
            Check(c["name"], c["paper_anchor"], c["status"], c.get("witness"), c.get("numbers", {}))
            for c in data["checks"]
        ]
        return cls(data["command"], data.get("inputs_digest", ""), checks)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            lines.append(f"{c.status.upper():4}  {c.name}")
            if not c.passed and c.witness is not None:
                lines.append(f"      witness: {json.dumps(_plain(c.witness), ensure_ascii=True)}")
        lines.append(f"{len(self.checks) - len(self.failures())}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def digest(text: str | bytes) -> str:
    if isinstance(text, str):
        text = text.encode()
    return "sha256:" + hashlib.sha256(text).hexdigest()


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, ensure_ascii=True, indent=2) + "\n"

