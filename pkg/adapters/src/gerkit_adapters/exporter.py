"""Dataset-directory to manifest conversion.

Expected layout: one subdirectory per utterance, named with a category
prefix (dac-/sn-/ss-/sw-, case-insensitive), holding transcript.txt and
audio.wav.  Non-directories are ignored; per-item problems are collected
and reported, never abort the export.  Emitted rows use audio paths
relative to the dataset directory, so a manifest written inside it
resolves cleanly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

_CATEGORY_PREFIXES = {"dac": "DAC", "sn": "SN", "ss": "SS", "sw": "SW"}


@dataclass(frozen=True)
class ExportItemError:
    utterance_id: str
    message: str


@dataclass(frozen=True)
class ExportResult:
    manifest: bytes  # JSON Lines, one row per exported utterance
    exported: int
    errors: tuple[ExportItemError, ...]


def export_manifest(dataset_dir: str | Path) -> ExportResult:
    """Walk the dataset directory and emit one manifest row per utterance.

    Rows come out in sorted directory-name order; an empty directory yields
    an empty manifest.
    """
    root = Path(dataset_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory not found: {root}")
    lines: list[str] = []
    errors: list[ExportItemError] = []
    for item in sorted(root.iterdir()):
        if not item.is_dir():
            continue
        utterance_id = item.name
        category = _CATEGORY_PREFIXES.get(utterance_id.split("-")[0].lower())
        if category is None:
            errors.append(
                ExportItemError(
                    utterance_id,
                    "cannot infer category from directory name "
                    "(expected a dac-/sn-/ss-/sw- prefix)",
                )
            )
            continue
        transcript_path = item / "transcript.txt"
        audio_path = item / "audio.wav"
        if not transcript_path.is_file():
            errors.append(ExportItemError(utterance_id, "missing transcript.txt"))
            continue
        if not audio_path.is_file():
            errors.append(ExportItemError(utterance_id, "missing audio.wav"))
            continue
        row = {
            "utterance_id": utterance_id,
            "category": category,
            "transcript_raw": transcript_path.read_text(encoding="utf-8").strip(),
            "audio_path": f"{utterance_id}/audio.wav",
        }
        lines.append(json.dumps(row, ensure_ascii=False))
    manifest = ("\n".join(lines) + "\n" if lines else "").encode("utf-8")
    return ExportResult(manifest=manifest, exported=len(lines), errors=tuple(errors))
