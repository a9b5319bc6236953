"""Pipeline configuration: defaults, TOML file, CLI overrides.

Precedence is CLI > file > default, applied field by field.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import GerkitError
from .metrics import DEFAULT_WEIGHTS, SemScoreWeights


class ConfigError(GerkitError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    n_best: int = 20
    k_select: int = 5
    ger_backend: str = "passthrough"  # passthrough | oracle | remote
    ger_endpoint: str | None = None
    scorer_endpoint: str | None = None
    weights: SemScoreWeights = DEFAULT_WEIGHTS
    seed: int = 0
    concurrency: int = 4
    retry_max: int = 3
    retry_backoff_s: float = 0.5
    report_format: str = "table"  # table | json
    asr_source: str = "precomputed"  # precomputed | remote
    asr_endpoint: str | None = None

    def __post_init__(self):
        if not 1 <= self.k_select <= self.n_best:
            raise ConfigError(
                f"k_select must satisfy 1 <= k_select <= n_best, got "
                f"k_select={self.k_select}, n_best={self.n_best}"
            )
        if self.ger_backend not in ("passthrough", "oracle", "remote"):
            raise ConfigError(f"unknown ger_backend {self.ger_backend!r}")
        if self.ger_backend == "remote" and not self.ger_endpoint:
            raise ConfigError("ger_backend 'remote' requires ger_endpoint")
        if self.report_format not in ("table", "json"):
            raise ConfigError(f"unknown report format {self.report_format!r}")
        if self.asr_source not in ("precomputed", "remote"):
            raise ConfigError(f"unknown asr_source {self.asr_source!r}")
        if self.asr_source == "remote" and not self.asr_endpoint:
            raise ConfigError("asr_source 'remote' requires asr_endpoint")
        if self.concurrency < 1:
            raise ConfigError(f"concurrency must be >= 1, got {self.concurrency}")
        if self.retry_max < 0:
            raise ConfigError(f"retry_max must be >= 0, got {self.retry_max}")
        if self.retry_backoff_s < 0:
            raise ConfigError(f"retry_backoff_s must be >= 0, got {self.retry_backoff_s}")


# Sectioned TOML key -> config field.  Top-level keys are also accepted.
_KEY_MAP = {
    ("selection", "n_best"): "n_best",
    ("selection", "k_select"): "k_select",
    ("ger", "backend"): "ger_backend",
    ("ger", "endpoint"): "ger_endpoint",
    ("scoring", "endpoint"): "scorer_endpoint",
    ("pipeline", "seed"): "seed",
    ("pipeline", "concurrency"): "concurrency",
    ("pipeline", "retry_max"): "retry_max",
    ("pipeline", "retry_backoff_s"): "retry_backoff_s",
    ("pipeline", "report_format"): "report_format",
    ("asr", "source"): "asr_source",
    ("asr", "endpoint"): "asr_endpoint",
}

_FIELD_NAMES = {f.name for f in fields(PipelineConfig)}


def _weights_from_value(value, where: str) -> SemScoreWeights:
    if isinstance(value, str):
        parts = value.split(",")
    elif isinstance(value, (list, tuple)):
        parts = list(value)
    else:
        raise ConfigError(f"{where}: weights must be three numbers")
    if len(parts) != 3:
        raise ConfigError(f"{where}: weights must have exactly 3 components, got {len(parts)}")
    try:
        sem, phon, ent = (float(p) for p in parts)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: weights must be numeric") from None
    try:
        return SemScoreWeights(w_semantic=sem, w_phonetic=phon, w_entailment=ent)
    except Exception as exc:
        raise ConfigError(f"{where}: {exc}") from None


def load_config_file(path: str | Path) -> dict:
    """Read a TOML config file into a flat {field: value} dict."""
    try:
        with open(path, "rb") as handle:
            doc = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None

    flat: dict = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            for sub_key, sub_value in value.items():
                if (key, sub_key) in _KEY_MAP:
                    flat[_KEY_MAP[(key, sub_key)]] = sub_value
                elif key == "scoring" and sub_key == "weights":
                    flat["weights"] = _weights_from_value(sub_value, f"{path}: scoring.weights")
                elif sub_key in _FIELD_NAMES:
                    flat[sub_key] = sub_value
                else:
                    raise ConfigError(f"{path}: unknown key {key}.{sub_key}")
        elif key == "weights":
            flat["weights"] = _weights_from_value(value, f"{path}: weights")
        elif key in _FIELD_NAMES:
            flat[key] = value
        else:
            raise ConfigError(f"{path}: unknown key {key}")
    return flat


def build_config(file_path: str | Path | None = None, cli_overrides: dict | None = None) -> PipelineConfig:
    """Merge defaults, optional config file, and CLI overrides."""
    merged: dict = {}
    if file_path is not None:
        merged.update(load_config_file(file_path))
    for key, value in (cli_overrides or {}).items():
        if value is None:
            continue
        if key == "weights" and not isinstance(value, SemScoreWeights):
            value = _weights_from_value(value, "--weights")
        if key not in _FIELD_NAMES:
            raise ConfigError(f"unknown config field {key!r}")
        merged[key] = value
    try:
        return replace(PipelineConfig(), **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
