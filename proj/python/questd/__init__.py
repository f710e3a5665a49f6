"""Python access to the questd core: catalog, report parsers, change classification,
event-log replay and the group statistics."""

import json
from os import PathLike
from typing import Any, Optional, Sequence, Union

from . import _questd
from ._questd import (
    ConfigError,
    CorruptState,
    EmptySample,
    Error,
    InvalidEvent,
    InvalidTable,
    LengthMismatch,
    MalformedReport,
    NotConfirmed,
    OutOfOrderEvent,
    SampleTooLarge,
    SnapshotMismatch,
    TooFewValues,
    ZeroVariance,
)

__version__ = "0.1.0"

__all__ = [
    "catalog", "parse_junit", "parse_jacoco", "parse_lcov", "classify_change", "replay", "replay_file",
    "state_digest", "fisher_exact", "wilcoxon_exact", "pearson", "ci_mean", "group_report",
    "Error", "MalformedReport", "InvalidEvent", "OutOfOrderEvent", "SnapshotMismatch", "CorruptState",
    "NotConfirmed", "ConfigError", "EmptySample", "SampleTooLarge", "InvalidTable", "ZeroVariance",
    "TooFewValues", "LengthMismatch",
]


def catalog() -> dict:
    """The achievement catalog, as served by GET /achievements."""
    return json.loads(_questd.catalog_json())


def parse_junit(xml: str) -> dict:
    return json.loads(_questd.parse_junit(xml))


def parse_jacoco(xml: str) -> dict:
    return json.loads(_questd.parse_jacoco(xml))


def parse_lcov(text: str, strict: bool = True) -> dict:
    return json.loads(_questd.parse_lcov(text, strict))


def classify_change(prev: Optional[str], next: str, path: str) -> dict:
    """File class and change facts for one edit; `prev` is None for a new file."""
    return json.loads(_questd.classify_change(prev, next, path))


def replay(ndjson: str, idle_minutes: int = 30) -> dict:
    """Replays an event log. Returns {"state": <GET /state document>, "notifications": [...]}."""
    return json.loads(_questd.replay_ndjson(ndjson, idle_minutes))


def replay_file(path: Union[str, PathLike], idle_minutes: int = 30) -> dict:
    with open(path, encoding="utf-8") as f:
        return replay(f.read(), idle_minutes)


def state_digest(ndjson: str) -> str:
    return _questd.state_digest(ndjson)


def fisher_exact(a: int, b: int, c: int, d: int) -> tuple:
    """Two-sided p for [[a, b], [c, d]]; returns (p, degenerate)."""
    return _questd.fisher_exact(a, b, c, d)


def wilcoxon_exact(x: Sequence[float], y: Sequence[float], exact_cap: int = 25, large: str = "reject",
                   seed: Optional[int] = None) -> dict:
    """Two-sided rank-sum test; `large` picks the method above `exact_cap`."""
    args: dict[str, Any] = {"exact_cap": exact_cap, "large": large}
    if seed is not None:
        args["seed"] = seed
    p, rank_sum, mode = _questd.wilcoxon_exact(list(x), list(y), **args)
    return {"p": p, "rank_sum": rank_sum, "mode": mode}


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple:
    """Returns (r, r_squared)."""
    return _questd.pearson(list(x), list(y))


def ci_mean(values: Sequence[float], level: float = 0.846) -> tuple:
    """Normal interval for the mean; returns (lo, hi)."""
    return _questd.ci_mean(list(values), level)


def group_report(groups: dict, logs_dir: Union[str, PathLike] = ".", ci_level: float = 0.846,
                 large: str = "permutation") -> dict:
    """Group comparison report for {"group": [log paths]}."""
    return json.loads(_questd.group_report(json.dumps(groups), str(logs_dir), ci_level, large))
