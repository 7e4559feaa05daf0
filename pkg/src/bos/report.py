"""Named checks and the versioned JSON report shared by the CLI and the tests."""

from __future__ import annotations

import datetime as _dt
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

SCHEMA_VERSION = 1

_OPS = {
    "<=": lambda v, t: v <= t,
    ">=": lambda v, t: v >= t,
    "<": lambda v, t: v < t,
    "==": lambda v, t: v == t,
    "in": lambda v, t: t[0] <= v <= t[1],
}


@dataclass(frozen=True)
class Check:
    name: str
    value: Any
    threshold: Any
    op: str
    passed: bool
    criterion: int | None = None
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {_fmt(self.value)} {self.op} {_fmt(self.threshold)}" + (
            f"  ({self.detail})" if self.detail else ""
        )


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.3e}"
    if isinstance(v, (tuple, list)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return f"[{v[0]:g}, {v[1]:g}]"
    return str(v)


def check(name: str, value, threshold, op: str = "<=", criterion: int | None = None, detail: str = "") -> Check:
    """Evaluate ``value op threshold``; NaN values fail."""
    if isinstance(value, (float, np.floating)) and math.isnan(value):
        ok = False
    else:
        ok = bool(_OPS[op](value, threshold))
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        value = value.item()
    return Check(name, value, threshold, op, ok, criterion, detail)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _jsonable(obj.item())
    if isinstance(obj, complex):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def timestamp() -> str:
    """UTC timestamp, taken from ``SOURCE_DATE_EPOCH`` when set (reproducible builds)."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = (
        _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc)
        if epoch
        else _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0)
    )
    return when.isoformat().replace("+00:00", "Z")


@dataclass
class Report:
    command: str
    config: dict
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    error: dict | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def add(self, *checks: Check) -> None:
        self.checks.extend(checks)

    def as_dict(self) -> dict:
        return _jsonable(
            {
                "schema_version": SCHEMA_VERSION,
                "timestamp": timestamp(),
                "command": self.command,
                "config": self.config,
                "results": self.results,
                "checks": [
                    {
                        "name": c.name,
                        "criterion": c.criterion,
                        "value": c.value,
                        "threshold": c.threshold,
                        "op": c.op,
                        "pass": c.passed,
                        "detail": c.detail,
                    }
                    for c in self.checks
                ],
                "passed": self.passed,
                "error": self.error,
            }
        )

    def write(self, path: Union[str, Path]) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.as_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
