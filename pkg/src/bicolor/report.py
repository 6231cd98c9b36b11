"""Canonical JSON report objects shared by the constructive engines and CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass
class Check:
    """One named verification outcome; `method` records exhaustive vs sampled."""

    name: str
    passed: bool
    witness: object = None
    method: str = "exhaustive"

    def to_json(self) -> dict:
        obj = {"name": self.name, "pass": self.passed, "method": self.method}
        if self.witness is not None:
            obj["witness"] = self.witness
        return obj


def all_pass(checks) -> bool:
    return all(c.passed for c in checks)


def checks_json(checks) -> list:
    return [c.to_json() for c in checks]


def canonical_dumps(obj) -> str:
    """Stable byte representation: sorted keys, no whitespace, one newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"
