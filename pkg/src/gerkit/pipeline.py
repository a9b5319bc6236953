"""Batch orchestration: manifest rows through selection, correction, scoring.

Rows run in a bounded thread pool; results are collected by manifest
position, so output ordering never depends on scheduling.  Per-utterance
failures are quarantined into a failure log and the batch continues.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TypeVar

from . import remote
from .config import ConfigError, PipelineConfig
from .ger import (
    CorrectionResult,
    GerBackend,
    OracleBackend,
    PassthroughBackend,
    RemoteBackend,
    build_prompt,
)
from .metrics import (
    CategoryReport,
    EvaluationRecord,
    aggregate_report,
    dual_reference_evaluate,
    record_from_dict,
    record_to_dict,
)
from .manifest import ManifestRow
from .nbest import (
    Hypothesis,
    NBestList,
    Segment,
    SegmentedNBest,
    concat_segments,
    nbest_from_dict,
    parse_nbest_file,
    select_diverse,
)
from .scorers import (
    LexicalEntailmentScorer,
    LexicalOverlapScorer,
    PhoneticScorer,
    RemoteScorer,
    Scorer,
)
from .transcript import clean_reference, parse_annotations, verbatim_reference

T = TypeVar("T")


@dataclass(frozen=True)
class PipelineFailure:
    utterance_id: str
    stage: str  # fetch | select | correct | score
    message: str


def _with_retries(fn: Callable[[], T], retry_max: int, backoff_s: float) -> T:
    """Run fn, retrying retryable remote errors with exponential backoff."""
    attempt = 0
    while True:
        try:
            return fn()
        except remote.RemoteError as exc:
            if not exc.retryable or attempt >= retry_max:
                raise
            if backoff_s > 0:
                time.sleep(backoff_s * (2**attempt))
            attempt += 1


def _truncate(segmented: SegmentedNBest, n_best: int) -> SegmentedNBest:
    """Drop hypotheses ranked below n_best; ranks stay contiguous from 1."""
    segments = []
    changed = False
    for segment in segmented.segments:
        kept = tuple(h for h in segment.hypotheses if h.rank <= n_best)
        if len(kept) != len(segment.hypotheses):
            changed = True
            segment = Segment(hypotheses=kept, start_s=segment.start_s, end_s=segment.end_s)
        segments.append(segment)
    if not changed:
        return segmented
    return SegmentedNBest(utterance_id=segmented.utterance_id, segments=tuple(segments))


def fetch_nbest(
    row: ManifestRow, config: PipelineConfig, timeout_s: float = 120.0
) -> SegmentedNBest:
    """Obtain an utterance's N-best document per the configured source."""
    if config.asr_source == "precomputed":
        if row.nbest_path is None:
            raise ConfigError(
                f"{row.utterance_id}: asr_source 'precomputed' but the row has no nbest_path"
            )
        document = parse_nbest_file(Path(row.nbest_path).read_bytes())
    else:
        if row.audio_path is None:
            raise ConfigError(
                f"{row.utterance_id}: asr_source 'remote' but the row has no audio_path"
            )
        payload = {"audio_path": row.audio_path, "n_best": config.n_best}
        url = config.asr_endpoint.rstrip("/") + "/transcribe"
        body = remote.post_json(url, payload, timeout_s=timeout_s)
        try:
            document = nbest_from_dict(body)
        except Exception as exc:
            raise remote.MalformedResponseError(f"{url}: invalid N-best document: {exc}") from exc
    return _truncate(document, config.n_best)


def make_backend(config: PipelineConfig) -> GerBackend:
    if config.ger_backend == "passthrough":
        return PassthroughBackend()
    if config.ger_backend == "oracle":
        return OracleBackend()
    return RemoteBackend(config.ger_endpoint)


def make_scorers(config: PipelineConfig) -> dict[str, Scorer]:
    """Assemble the three SemScore component scorers.

    With a scorer endpoint, semantic and entailment go over the wire;
    the phonetic component is always computed locally.  Without one,
    degenerate lexical stand-ins keep the pipeline runnable offline.
    """
    if config.scorer_endpoint:
        return {
            "semantic": RemoteScorer("semantic", config.scorer_endpoint),
            "phonetic": PhoneticScorer(),
            "entailment": RemoteScorer("entailment", config.scorer_endpoint),
        }
    return {
        "semantic": LexicalOverlapScorer(),
        "phonetic": PhoneticScorer(),
        "entailment": LexicalEntailmentScorer(),
    }


def _empty_nbest(utterance_id: str) -> NBestList:
    # A silence-only utterance has no segments; score the empty hypothesis.
    return NBestList(utterance_id=utterance_id, hypotheses=(Hypothesis(rank=1, text=""),))


def _process_row(
    row: ManifestRow,
    config: PipelineConfig,
    backend: GerBackend,
    scorers: dict[str, Scorer],
) -> tuple[EvaluationRecord, CorrectionResult]:
    stage = "fetch"
    try:
        segmented = _with_retries(
            lambda: fetch_nbest(row, config), config.retry_max, config.retry_backoff_s
        )
        stage = "select"
        if segmented.segments:
            pool = concat_segments(segmented)
        else:
            pool = _empty_nbest(row.utterance_id)
        selection = select_diverse(pool, config.k_select)
        prompt = build_prompt(selection)

        stage = "correct"
        transcript = parse_annotations(row.transcript_raw)
        reference = verbatim_reference(transcript)
        started = time.monotonic()
        final_text = _with_retries(
            lambda: backend.correct(prompt, reference=reference),
            config.retry_max,
            config.retry_backoff_s,
        )
        latency_s = time.monotonic() - started
        correction = CorrectionResult(
            utterance_id=row.utterance_id,
            final_text=final_text,
            selected=selection,
            prompt=prompt,
            backend_name=backend.name,
            latency_s=latency_s,
        )

        stage = "score"
        scored = dual_reference_evaluate(
            final_text,
            verbatim=reference,
            clean=clean_reference(transcript),
            weights=config.weights,
            scorers=scorers,
        )
        record = EvaluationRecord(
            utterance_id=row.utterance_id,
            category=row.category,
            chosen_reference=scored.chosen_reference,
            wer=scored.wer,
            semscore=scored.semscore,
        )
        return record, correction
    except Exception as exc:
        raise _StageFailure(stage, exc) from exc


class _StageFailure(Exception):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def run_pipeline(
    rows: list[ManifestRow],
    config: PipelineConfig,
    backend: GerBackend | None = None,
    scorers: dict[str, Scorer] | None = None,
) -> tuple[list[EvaluationRecord], list[CorrectionResult], list[PipelineFailure]]:
    """Process every manifest row; never abort the batch on one bad row.

    Returns records and corrections in manifest order (failed rows
    omitted) plus the failure log.
    """
    backend = backend if backend is not None else make_backend(config)
    scorers = scorers if scorers is not None else make_scorers(config)

    def job(row: ManifestRow):
        return _process_row(row, config, backend, scorers)

    outcomes: list[tuple[EvaluationRecord, CorrectionResult] | PipelineFailure] = [None] * len(rows)
    if rows:
        with ThreadPoolExecutor(max_workers=config.concurrency) as pool:
            futures = [pool.submit(job, row) for row in rows]
            for index, (row, future) in enumerate(zip(rows, futures)):
                try:
                    outcomes[index] = future.result()
                except _StageFailure as exc:
                    outcomes[index] = PipelineFailure(
                        utterance_id=row.utterance_id, stage=exc.stage, message=str(exc.cause)
                    )

    records: list[EvaluationRecord] = []
    corrections: list[CorrectionResult] = []
    failures: list[PipelineFailure] = []
    for outcome in outcomes:
        if isinstance(outcome, PipelineFailure):
            failures.append(outcome)
        else:
            record, correction = outcome
            records.append(record)
            corrections.append(correction)
    return records, corrections, failures


def _format_count(value: int) -> str:
    return f"{value:,}"


def _report_payload(report: CategoryReport) -> dict:
    def stats_dict(stats) -> dict:
        return {
            "count": stats.count,
            "errors": stats.errors,
            "ref_len": stats.ref_len,
            "wer": stats.wer,
            "semscore": stats.semscore,
        }

    return {
        "categories": {cat.value: stats_dict(s) for cat, s in report.categories.items()},
        "overall": stats_dict(report.overall),
    }


def emit_report(records: list[EvaluationRecord], report_format: str = "table") -> bytes:
    """Render the category breakdown; see aggregate_report for the math."""
    report = aggregate_report(records)
    if report_format == "json":
        return (json.dumps(_report_payload(report), indent=2, ensure_ascii=False) + "\n").encode(
            "utf-8"
        )
    if report_format != "table":
        raise ConfigError(f"unknown report format {report_format!r}")

    rows = [(cat.value, stats) for cat, stats in report.categories.items()]
    rows.append(("Overall", report.overall))
    cells = [
        (name, _format_count(stats.count), f"{stats.wer:.2f}", f"{stats.semscore:.2f}")
        for name, stats in rows
    ]
    header = ("Category", "#", "WER", "SemScore")
    widths = [
        max(len(header[col]), *(len(row[col]) for row in cells)) for col in range(len(header))
    ]

    def render(row: tuple[str, str, str, str]) -> str:
        name = row[0].ljust(widths[0])
        numbers = [row[col].rjust(widths[col]) for col in range(1, len(header))]
        return "  ".join([name, *numbers]).rstrip()

    header_line = render(header)
    lines = [header_line, "-" * len(header_line)]
    lines.extend(render(row) for row in cells)
    return ("\n".join(lines) + "\n").encode("utf-8")


def write_records(records: list[EvaluationRecord]) -> bytes:
    lines = [json.dumps(record_to_dict(r), ensure_ascii=False) for r in records]
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def read_records(data: bytes | str) -> list[EvaluationRecord]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return [record_from_dict(json.loads(line)) for line in data.splitlines() if line.strip()]


def write_failures(failures: list[PipelineFailure]) -> bytes:
    lines = [
        json.dumps(
            {"utterance_id": f.utterance_id, "stage": f.stage, "message": f.message},
            ensure_ascii=False,
        )
        for f in failures
    ]
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def resolve_row_paths(rows: list[ManifestRow], base: Path) -> list[ManifestRow]:
    """Re-anchor relative audio/nbest paths against the manifest's directory."""
    resolved = []
    for row in rows:
        updates = {}
        for field in ("audio_path", "nbest_path"):
            value = getattr(row, field)
            if value is not None and not Path(value).is_absolute():
                updates[field] = str(base / value)
        if updates:
            row = ManifestRow(
                utterance_id=row.utterance_id,
                category=row.category,
                transcript_raw=row.transcript_raw,
                audio_path=updates.get("audio_path", row.audio_path),
                nbest_path=updates.get("nbest_path", row.nbest_path),
                line=row.line,
            )
        resolved.append(row)
    return resolved
