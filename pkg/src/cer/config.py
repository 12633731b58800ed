"""Run configuration with layered precedence.

Values resolve as: CLI flag > environment variable > config file >
built-in default. Config files are JSON or key=value lines; unknown
keys are rejected up front so typos fail before any work starts.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields

from .errors import ConfigError

ENV_KEYS = {
    "llm_endpoint": "CER_LLM_ENDPOINT",
    "llm_api_key": "CER_LLM_API_KEY",
    "embed_endpoint": "CER_EMBED_ENDPOINT",
}


@dataclass
class RunConfig:
    retriever_mode: str = "sparse"
    k: int = 20
    m: int = 3
    prompt_variant: str = "full"
    llm_endpoint: str | None = None
    llm_api_key: str | None = None
    embed_endpoint: str | None = None
    cache_dir: str | None = None
    seed: int = 42
    strict_counts: bool = False
    char_budget: int = 24000
    max_in_flight: int = 4
    k1: float = 1.2
    b: float = 0.75
    learning_rate: float = 0.1
    l2: float = 1e-4
    max_epochs: int = 200
    patience: int = 10

    def validate(self) -> "RunConfig":
        if self.retriever_mode not in ("sparse", "dense"):
            raise ConfigError(
                f"retriever_mode must be 'sparse' or 'dense', got {self.retriever_mode!r}"
            )
        if self.prompt_variant not in ("full", "no_role", "no_evidence", "no_justification"):
            raise ConfigError(f"unknown prompt_variant {self.prompt_variant!r}")
        for name in ("k", "m", "char_budget", "max_in_flight", "max_epochs", "patience"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.k1 <= 0:
            raise ConfigError(f"k1 must be positive, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ConfigError(f"b must be in [0, 1], got {self.b}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.l2 < 0:
            raise ConfigError(f"l2 must be >= 0, got {self.l2}")
        return self


_FIELDS = {f.name: f.type for f in fields(RunConfig)}

_BOOL_STRINGS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _coerce(key: str, value):
    marker = _FIELDS[key]
    if marker in ("int", int):
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise ConfigError(f"config key {key!r} expects an integer, got {value!r}")
        try:
            return int(value)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r} expects an integer, got {value!r}") from exc
    if marker in ("float", float):
        if isinstance(value, bool) or not isinstance(value, (int, float, str)):
            raise ConfigError(f"config key {key!r} expects a number, got {value!r}")
        try:
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r} expects a number, got {value!r}") from exc
    if marker in ("bool", bool):
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in _BOOL_STRINGS:
            return _BOOL_STRINGS[value.lower()]
        raise ConfigError(f"config key {key!r} expects a boolean, got {value!r}")
    return str(value)


def load_config_file(path) -> dict:
    """Parse a JSON or key=value config file into a validated dict."""
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc.msg})") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
    else:
        raw = {}
        for line_no, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path} line {line_no}: expected key=value")
            key, _, value = line.partition("=")
            raw[key.strip()] = value.strip()
    out = {}
    for key, value in raw.items():
        if key not in _FIELDS:
            raise ConfigError(f"{path}: unknown config key {key!r}")
        out[key] = _coerce(key, value)
    return out


def resolve_config(cli_values: dict | None = None, config_path=None) -> RunConfig:
    """Merge defaults, config file, environment, and CLI flags."""
    merged: dict = {}
    if config_path is not None:
        merged.update(load_config_file(config_path))
    for key, env_name in ENV_KEYS.items():
        value = os.environ.get(env_name)
        if value:
            merged[key] = value
    for key, value in (cli_values or {}).items():
        if value is None:
            continue
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = _coerce(key, value)
    return RunConfig(**merged).validate()
