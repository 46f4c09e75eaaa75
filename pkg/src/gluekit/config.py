"""Numerical tolerances and resource limits shared by all modules."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .errors import InvalidArg


@dataclass(frozen=True)
class Config:
    push_tol: float = 1e-8
    rank_tol: float = 1e-10
    flat_tol: float = 1e-8
    factor_tol: float = 1e-6
    eig_tol: float = 1e-12
    canonical_tol: float = 1e-9
    max_depth: int = 64
    memory_guard: int = 2**24
    seed: int = 0

    def __post_init__(self):
        for name in ("push_tol", "rank_tol", "flat_tol", "factor_tol", "eig_tol", "canonical_tol"):
            value = getattr(self, name)
            if not 0 < value < 1e-2:
                raise InvalidArg(f"{name}={value!r} must lie in (0, 1e-2)")
        if self.max_depth < 1:
            raise InvalidArg("max_depth must be positive")
        if self.memory_guard < 1:
            raise InvalidArg("memory_guard must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "Config":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidArg(f"unknown config keys: {sorted(unknown)}")
        return replace(cls(), **data)

    @classmethod
    def load(cls, path: str | Path) -> "Config":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidArg(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidArg("config file must hold a JSON object")
        return cls.from_dict(data)


DEFAULT = Config()
