"""Model adapters exposing ASR and generation backends over the gerkit wire contracts."""

from .asr import (
    DEFAULT_MODEL_ID as DEFAULT_ASR_MODEL_ID,
    LexiconAsrModel,
    create_asr_app,
    detect_voiced_chunks,
    serve_asr,
)
from .config import (
    ASR_ENV_PREFIX,
    GER_ENV_PREFIX,
    AdapterConfig,
    AdapterConfigError,
    config_from_env,
)
from .exporter import ExportItemError, ExportResult, export_manifest
from .generation import (
    DEFAULT_MODEL_ID as DEFAULT_GER_MODEL_ID,
    ConsensusGerModel,
    create_ger_app,
    serve_ger,
)

__all__ = [
    "ASR_ENV_PREFIX",
    "GER_ENV_PREFIX",
    "AdapterConfig",
    "AdapterConfigError",
    "ConsensusGerModel",
    "DEFAULT_ASR_MODEL_ID",
    "DEFAULT_GER_MODEL_ID",
    "ExportItemError",
    "ExportResult",
    "LexiconAsrModel",
    "config_from_env",
    "create_asr_app",
    "create_ger_app",
    "detect_voiced_chunks",
    "export_manifest",
    "serve_asr",
    "serve_ger",
]

__version__ = "0.1.0"
