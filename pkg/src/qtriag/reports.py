"""Machine-readable verification reports.

One :class:`Report` per command invocation.  The JSON schema is versioned
and its residual names are a stable contract for CI: a report passes iff
every named residual is within its declared tolerance.  Serialization sorts
keys, so two runs with the same seed differ only in ``timing_ms``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__

SCHEMA_VERSION = 1


@dataclass
class Report:
    command: str
    params: dict
    seed: int
    residuals: dict[str, float] = field(default_factory=dict)
    tolerances: dict[str, float] = field(default_factory=dict)
    values: dict = field(default_factory=dict)
    timing_ms: float = 0.0
    error: str | None = None

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        return all(
            self.residuals[name] <= self.tolerances.get(name, 0.0)
            for name in self.residuals
        )

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "pass": self.passed,
            "residuals": self.residuals,
            "tolerances": self.tolerances,
            "values": self.values,
            "timing_ms": self.timing_ms,
            "tool_version": __version__,
            "error": self.error,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"
