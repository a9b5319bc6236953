"""Command-line entry points: serve-asr, serve-ger, export-manifest.

Exit codes match the primary toolkit: 0 clean, 1 partial (export finished
but some items were skipped), 2 hard failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import asr, generation
from .config import (
    ASR_ENV_PREFIX,
    GER_ENV_PREFIX,
    AdapterConfig,
    AdapterConfigError,
    config_from_env,
)
from .exporter import export_manifest

EXIT_CLEAN = 0
EXIT_PARTIAL = 1
EXIT_FAILED = 2


def _add_service_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--model", help="model identifier")
    parser.add_argument("--device", help="device to run the model on")
    parser.add_argument("--beam-width", type=int, dest="beam_width", help="decoder beam width")
    parser.add_argument(
        "--max-new-tokens", type=int, dest="max_new_tokens", help="generation length cap"
    )
    parser.add_argument("--port", type=int, help="port to listen on")
    parser.add_argument("--host", default="127.0.0.1", help="interface to bind")


def _service_config(args, prefix: str, default_model: str, default_port: int) -> AdapterConfig:
    config = config_from_env(prefix, AdapterConfig(model_id=default_model, port=default_port))
    updates = {
        field: getattr(args, field)
        for field in ("device", "beam_width", "max_new_tokens", "port")
        if getattr(args, field) is not None
    }
    if args.model is not None:
        updates["model_id"] = args.model
    return replace(config, **updates) if updates else config


def _cmd_serve_asr(args) -> int:
    config = _service_config(args, ASR_ENV_PREFIX, asr.DEFAULT_MODEL_ID, 8080)
    asr.serve_asr(config, host=args.host)
    return EXIT_CLEAN


def _cmd_serve_ger(args) -> int:
    config = _service_config(args, GER_ENV_PREFIX, generation.DEFAULT_MODEL_ID, 8081)
    generation.serve_ger(config, host=args.host)
    return EXIT_CLEAN


def _cmd_export(args) -> int:
    result = export_manifest(args.dataset_dir)
    for item in result.errors:
        sys.stderr.write(f"{item.utterance_id}: {item.message}\n")
    if args.out and args.out != "-":
        Path(args.out).write_bytes(result.manifest)
    else:
        sys.stdout.buffer.write(result.manifest)
        sys.stdout.buffer.flush()
    if result.errors:
        return EXIT_PARTIAL if result.exported else EXIT_FAILED
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gerkit-adapters",
        description="Reference ASR/generation services and a dataset exporter "
        "speaking the gerkit wire contracts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_asr = sub.add_parser("serve-asr", help="run the transcription service")
    _add_service_flags(p_asr)
    p_asr.set_defaults(func=_cmd_serve_asr)

    p_ger = sub.add_parser("serve-ger", help="run the generation service")
    _add_service_flags(p_ger)
    p_ger.set_defaults(func=_cmd_serve_ger)

    p_export = sub.add_parser("export-manifest", help="convert a dataset directory to a manifest")
    p_export.add_argument("dataset_dir")
    p_export.add_argument("--out", "-o", help="output path (default stdout)")
    p_export.set_defaults(func=_cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AdapterConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILED
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
