"""Dataset manifest ingestion.

A manifest is JSON Lines: one utterance per line with its category,
annotated transcript, and at least one of an audio path or a precomputed
N-best document path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import GerkitError
from .metrics import Category


class MalformedRowError(GerkitError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateIdError(GerkitError):
    def __init__(self, line: int, utterance_id: str):
        super().__init__(f"line {line}: duplicate utterance_id {utterance_id!r}")
        self.line = line
        self.utterance_id = utterance_id


class UnknownCategoryError(GerkitError):
    def __init__(self, line: int, category: str):
        super().__init__(f"line {line}: unknown category {category!r}")
        self.line = line
        self.category = category


@dataclass(frozen=True)
class ManifestRow:
    """One utterance to process.

    line is the 1-based manifest line the row came from, attached so
    downstream failures can point back at the source.
    """

    utterance_id: str
    category: Category
    transcript_raw: str
    audio_path: str | None = None
    nbest_path: str | None = None
    line: int = 0

    def __post_init__(self):
        if self.audio_path is None and self.nbest_path is None:
            raise ValueError(
                f"row {self.utterance_id!r}: at least one of audio_path/nbest_path is required"
            )


def row_to_dict(row: ManifestRow) -> dict:
    out = {
        "utterance_id": row.utterance_id,
        "category": row.category.value,
        "transcript_raw": row.transcript_raw,
    }
    if row.audio_path is not None:
        out["audio_path"] = row.audio_path
    if row.nbest_path is not None:
        out["nbest_path"] = row.nbest_path
    return out


def _row_from_dict(obj: dict, line: int) -> ManifestRow:
    for field in ("utterance_id", "category", "transcript_raw"):
        if field not in obj:
            raise MalformedRowError(line, f"missing field {field!r}")
        if not isinstance(obj[field], str):
            raise MalformedRowError(line, f"field {field!r} must be a string")
    for field in ("audio_path", "nbest_path"):
        if obj.get(field) is not None and not isinstance(obj[field], str):
            raise MalformedRowError(line, f"field {field!r} must be a string or null")
    try:
        category = Category(obj["category"])
    except ValueError:
        raise UnknownCategoryError(line, obj["category"]) from None
    try:
        return ManifestRow(
            utterance_id=obj["utterance_id"],
            category=category,
            transcript_raw=obj["transcript_raw"],
            audio_path=obj.get("audio_path"),
            nbest_path=obj.get("nbest_path"),
            line=line,
        )
    except ValueError as exc:
        raise MalformedRowError(line, str(exc)) from None


def ingest_manifest(path: str | Path) -> list[ManifestRow]:
    """Parse and validate a JSON Lines manifest.

    Blank lines are skipped.  Errors carry the 1-based line number.
    """
    text = Path(path).read_text(encoding="utf-8")
    rows: list[ManifestRow] = []
    seen: dict[str, int] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRowError(line_no, f"invalid JSON: {exc.msg}") from None
        if not isinstance(obj, dict):
            raise MalformedRowError(line_no, "row must be a JSON object")
        row = _row_from_dict(obj, line_no)
        if row.utterance_id in seen:
            raise DuplicateIdError(line_no, row.utterance_id)
        seen[row.utterance_id] = line_no
        rows.append(row)
    return rows
