"""Adapter service configuration.

Both services read the same shape: which model to serve, where to run it,
decoding limits, and the port to listen on.  Deployment basics come from
environment variables (GERKIT_ASR_* for the transcription service,
GERKIT_GER_* for the generation service); CLI flags override both.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from typing import Mapping

ASR_ENV_PREFIX = "GERKIT_ASR_"
GER_ENV_PREFIX = "GERKIT_GER_"


class AdapterConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AdapterConfig:
    """Settings for one adapter service.

    beam_width is the decoder's candidate count, so it is also the largest
    n_best a /transcribe response can carry.
    """

    model_id: str
    device: str = "cpu"
    beam_width: int = 5
    max_new_tokens: int = 256
    port: int = 8080

    def __post_init__(self):
        if self.beam_width < 1:
            raise AdapterConfigError(f"beam_width must be >= 1, got {self.beam_width}")
        if self.max_new_tokens < 1:
            raise AdapterConfigError(f"max_new_tokens must be >= 1, got {self.max_new_tokens}")
        if not 1 <= self.port <= 65535:
            raise AdapterConfigError(f"port must be in 1..65535, got {self.port}")


def _env_int(env: Mapping[str, str], key: str) -> int | None:
    raw = env.get(key)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise AdapterConfigError(f"{key} must be an integer, got {raw!r}") from None


def config_from_env(
    prefix: str, base: AdapterConfig, environ: Mapping[str, str] | None = None
) -> AdapterConfig:
    """Overlay environment settings onto ``base``.

    Recognized variables: {prefix}MODEL, {prefix}DEVICE, {prefix}BEAM_WIDTH,
    {prefix}MAX_NEW_TOKENS, {prefix}PORT.
    """
    env = os.environ if environ is None else environ
    updates: dict = {}
    if prefix + "MODEL" in env:
        updates["model_id"] = env[prefix + "MODEL"]
    if prefix + "DEVICE" in env:
        updates["device"] = env[prefix + "DEVICE"]
    for field, key in (
        ("beam_width", "BEAM_WIDTH"),
        ("max_new_tokens", "MAX_NEW_TOKENS"),
        ("port", "PORT"),
    ):
        value = _env_int(env, prefix + key)
        if value is not None:
            updates[field] = value
    return replace(base, **updates) if updates else base
