"""Run configuration: defaults, JSON config files and command-line overrides."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional

from .instantiation import Caps
from .validation import Budget

DEFAULT_PROMPT = """\
// The following function contains a bug.
// Rewrite it so that all tests pass and reply with the complete fixed function only.
{function}
"""


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Sampling:
    top_p: float = 0.95
    temperature: float = 0.8


@dataclass(frozen=True)
class Config:
    max_patches_per_bug: int = 200
    max_candidates_per_skeleton: int = 500
    max_mods_per_patch: int = 3
    max_candidates_per_subset: int = 500
    enumeration_budget: int = 20000
    budget: Budget = field(default_factory=Budget)
    sampling: Sampling = field(default_factory=Sampling)
    test_command: str = ""
    compile_error_code: int = 2
    llm_endpoint: Optional[str] = None
    endpoint_timeout: float = 120.0
    prompt_template: str = DEFAULT_PROMPT
    keep_going: bool = False
    validation_workers: int = 1
    extra_sources: Optional[str] = None

    def __post_init__(self) -> None:
        for name in ("max_patches_per_bug", "max_candidates_per_skeleton", "max_mods_per_patch",
                     "max_candidates_per_subset", "enumeration_budget", "validation_workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if not 0 < self.sampling.top_p <= 1:
            raise ConfigError("top_p must lie in (0, 1]")
        if self.sampling.temperature < 0:
            raise ConfigError("temperature must be non-negative")

    @property
    def caps(self) -> Caps:
        return Caps(
            max_candidates_per_skeleton=self.max_candidates_per_skeleton,
            max_mods_per_patch=self.max_mods_per_patch,
            max_candidates_per_subset=self.max_candidates_per_subset,
            enumeration_budget=self.enumeration_budget,
        )

    def merged(self, overrides: Mapping[str, Any]) -> "Config":
        """A copy with ``overrides`` (config-file shaped, ``None`` values ignored) applied."""
        known = {f.name for f in fields(self)}
        changes: dict[str, Any] = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigError(f"unknown configuration key: {key}")
            if key == "budget":
                value = _sub(Budget, self.budget, value)
            elif key == "sampling":
                value = _sub(Sampling, self.sampling, value)
            changes[key] = value
        try:
            return replace(self, **changes)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, (Budget, Sampling)):
                v = {g.name: getattr(v, g.name) for g in fields(v)}
            out[f.name] = v
        return out


def _sub(cls, base, value):
    if isinstance(value, cls):
        return value
    if not isinstance(value, Mapping):
        raise ConfigError(f"expected an object for {cls.__name__.lower()}")
    allowed = {f.name for f in fields(cls)}
    unknown = set(value) - allowed
    if unknown:
        raise ConfigError(f"unknown {cls.__name__.lower()} keys: {', '.join(sorted(unknown))}")
    try:
        return replace(base, **value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: Optional[Path], base: Optional[Config] = None) -> Config:
    cfg = base or Config()
    if path is None:
        return cfg
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return cfg.merged(data)
