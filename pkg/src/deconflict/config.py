"""Configuration resolution: flags > environment > config file > defaults."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Optional

from .errors import ValidationError
from .judge.cache import JudgmentCache
from .judge.gateway import JudgeConfig

ENV_API_BASE = "JUDGE_API_BASE"
ENV_API_KEY = "JUDGE_API_KEY"
ENV_MODEL = "JUDGE_MODEL"
ENV_CACHE_DIR = "DECONFLICT_CACHE_DIR"

_ENV_BY_FIELD = {
    "api_base": ENV_API_BASE,
    "api_key": ENV_API_KEY,
    "model": ENV_MODEL,
}

_CONFIG_FIELDS = (
    "api_base",
    "api_key",
    "model",
    "prompt_id",
    "temperature",
    "max_in_flight",
    "retry_limit",
    "retry_backoff_ms",
    "timeout_ms",
    "swap_check",
)


def _load_config_file(path: Optional[str]) -> dict:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    unknown = set(data) - set(_CONFIG_FIELDS) - {"cache_dir"}
    if unknown:
        raise ValidationError(f"config file {path}: unknown keys {sorted(unknown)}")
    return data


def resolve_judge_config(
    flags: Optional[dict] = None, config_path: Optional[str] = None
) -> JudgeConfig:
    """Merge flag values, env vars, and a JSON config file over the defaults.

    flags holds JudgeConfig field names mapped to values; None values are
    treated as unset so unset CLI options fall through.
    """
    flags = {k: v for k, v in (flags or {}).items() if v is not None}
    file_values = _load_config_file(config_path)
    resolved = {}
    for name in _CONFIG_FIELDS:
        if name in flags:
            resolved[name] = flags[name]
            continue
        env_key = _ENV_BY_FIELD.get(name)
        if env_key and os.environ.get(env_key):
            resolved[name] = os.environ[env_key]
            continue
        if name in file_values:
            resolved[name] = file_values[name]
    return JudgeConfig(**resolved)


def resolve_cache(
    flag_value: Optional[str] = None, config_path: Optional[str] = None
) -> Optional[JudgmentCache]:
    """Cache directory from flag, env, or config file; None disables caching."""
    directory = flag_value or os.environ.get(ENV_CACHE_DIR)
    if not directory and config_path:
        directory = _load_config_file(config_path).get("cache_dir")
    if not directory:
        return None
    return JudgmentCache(Path(directory))
