"""Command-line entry points.

Subcommands: select, ger, score, pipeline, augment-plan, augment-apply,
report.  Exit codes: 0 clean, 1 partial (some utterances failed but the
batch completed), 2 hard failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import augment
from .config import build_config
from .errors import GerkitError
from .ger import build_prompt
from .manifest import ingest_manifest
from .metrics import dual_reference_evaluate
from .nbest import concat_segments, parse_nbest_file, select_diverse
from .pipeline import (
    emit_report,
    make_backend,
    make_scorers,
    read_records,
    resolve_row_paths,
    run_pipeline,
    write_failures,
    write_records,
)
from .transcript import clean_reference, parse_annotations, verbatim_reference

EXIT_CLEAN = 0
EXIT_PARTIAL = 1
EXIT_FAILED = 2


def _write_out(data: bytes, out: str | None):
    if out is None or out == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        Path(out).write_bytes(data)


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--n-best", type=int, dest="n_best", help="hypothesis pool size cap")
    parser.add_argument("--k", type=int, dest="k_select", help="hypotheses to select")
    parser.add_argument(
        "--ger-backend",
        dest="ger_backend",
        choices=("passthrough", "oracle", "remote"),
        help="correction backend",
    )
    parser.add_argument("--ger-endpoint", dest="ger_endpoint", help="generation service URL")
    parser.add_argument("--scorer-endpoint", dest="scorer_endpoint", help="scoring service URL")
    parser.add_argument("--weights", help="SemScore weights as w1,w2,w3")
    parser.add_argument("--seed", type=int, help="seed for deterministic planning")
    parser.add_argument(
        "--format", dest="report_format", choices=("table", "json"), help="report format"
    )
    parser.add_argument("--concurrency", type=int, help="max utterances in flight")
    parser.add_argument("--out", "-o", help="output path (default stdout)")


_CONFIG_FIELDS = (
    "n_best",
    "k_select",
    "ger_backend",
    "ger_endpoint",
    "scorer_endpoint",
    "weights",
    "seed",
    "report_format",
    "concurrency",
)


def _config_from_args(args: argparse.Namespace):
    overrides = {
        field: getattr(args, field, None)
        for field in _CONFIG_FIELDS
        if getattr(args, field, None) is not None
    }
    return build_config(file_path=getattr(args, "config", None), cli_overrides=overrides)


def _selection_for_file(nbest_path: str, config):
    document = parse_nbest_file(Path(nbest_path).read_bytes())
    pool = concat_segments(document)
    return pool, select_diverse(pool, config.k_select)


def _cmd_select(args) -> int:
    config = _config_from_args(args)
    pool, selection = _selection_for_file(args.nbest_file, config)
    payload = {
        "utterance_id": pool.utterance_id,
        "source_n": selection.source_n,
        "k": selection.k,
        "selected": [{"rank": rank, "text": text} for rank, text in selection.selected],
        "selection_order": list(selection.selection_order),
    }
    _write_out((json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8"), args.out)
    return EXIT_CLEAN


def _cmd_ger(args) -> int:
    config = _config_from_args(args)
    _, selection = _selection_for_file(args.nbest_file, config)
    prompt = build_prompt(selection)
    backend = make_backend(config)
    reference = None
    if args.reference_file:
        transcript = parse_annotations(Path(args.reference_file).read_text(encoding="utf-8"))
        reference = verbatim_reference(transcript)
    final_text = backend.correct(prompt, reference=reference)
    _write_out((final_text + "\n").encode("utf-8"), args.out)
    return EXIT_CLEAN


def _cmd_score(args) -> int:
    config = _config_from_args(args)
    hypothesis = Path(args.hyp_file).read_text(encoding="utf-8").strip()
    transcript = parse_annotations(Path(args.ref_file).read_text(encoding="utf-8").strip())
    scorers = make_scorers(config)
    scored = dual_reference_evaluate(
        hypothesis,
        verbatim=verbatim_reference(transcript),
        clean=clean_reference(transcript),
        weights=config.weights,
        scorers=scorers,
    )
    payload = {
        "chosen_reference": scored.chosen_reference,
        "reference_text": scored.reference_text,
        "wer": {
            "substitutions": scored.wer.substitutions,
            "deletions": scored.wer.deletions,
            "insertions": scored.wer.insertions,
            "hits": scored.wer.hits,
            "ref_len": scored.wer.ref_len,
            "wer": scored.wer.wer,
        },
        "semscore": scored.semscore,
    }
    _write_out((json.dumps(payload, indent=2, ensure_ascii=False) + "\n").encode("utf-8"), args.out)
    return EXIT_CLEAN


def _cmd_pipeline(args) -> int:
    config = _config_from_args(args)
    rows = ingest_manifest(args.manifest)
    rows = resolve_row_paths(rows, Path(args.manifest).resolve().parent)
    records, _corrections, failures = run_pipeline(rows, config)
    if args.records_out:
        Path(args.records_out).write_bytes(write_records(records))
    if failures:
        sys.stderr.write(write_failures(failures).decode("utf-8"))
    if not records:
        sys.stderr.write("error: every utterance failed\n")
        return EXIT_FAILED
    _write_out(emit_report(records, config.report_format), args.out)
    return EXIT_PARTIAL if failures else EXIT_CLEAN


def _cmd_augment_plan(args) -> int:
    config = _config_from_args(args)
    loader = augment.DirectoryNoiseLoader(args.noise_dir)
    pool = tuple(loader.ids())
    aug_config = augment.AugmentConfig(noise_pool=pool)
    rows = ingest_manifest(args.manifest)
    plans = [
        augment.plan_augmentation(config.seed, row.utterance_id, aug_config) for row in rows
    ]
    _write_out(augment.write_plans(plans), args.out)
    return EXIT_CLEAN


def _cmd_augment_apply(args) -> int:
    plans = augment.read_plans(Path(args.plans).read_bytes())
    rows = ingest_manifest(args.manifest)
    rows = resolve_row_paths(rows, Path(args.manifest).resolve().parent)
    by_id = {row.utterance_id: row for row in rows}
    loader = augment.DirectoryNoiseLoader(args.noise_dir)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    log_lines = []
    failures = 0
    for plan in plans:
        row = by_id.get(plan.utterance_id)
        try:
            if row is None:
                raise GerkitError("plan has no matching manifest row")
            if row.audio_path is None:
                raise GerkitError("manifest row has no audio_path")
            speech = augment.read_wav(row.audio_path)
            out, target = augment.apply_plan(speech, plan, loader)
            out_path = out_dir / f"{plan.utterance_id}.wav"
            augment.write_wav(out_path, out)
            log_lines.append(
                json.dumps(
                    {
                        "utterance_id": plan.utterance_id,
                        "audio_path": str(out_path),
                        "target_transform": target.value,
                    },
                    ensure_ascii=False,
                )
            )
        except GerkitError as exc:
            failures += 1
            sys.stderr.write(
                json.dumps({"utterance_id": plan.utterance_id, "message": str(exc)}) + "\n"
            )
    _write_out(("\n".join(log_lines) + "\n" if log_lines else "").encode("utf-8"), args.out)
    if failures and log_lines:
        return EXIT_PARTIAL
    if failures:
        return EXIT_FAILED
    return EXIT_CLEAN


def _cmd_report(args) -> int:
    config = _config_from_args(args)
    records = read_records(Path(args.records).read_bytes())
    _write_out(emit_report(records, config.report_format), args.out)
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gerkit",
        description="Two-stage ASR error correction: diverse hypothesis selection, "
        "prompted correction, dual-reference scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_select = sub.add_parser("select", help="pick k diverse hypotheses from an N-best file")
    p_select.add_argument("nbest_file")
    _add_config_flags(p_select)
    p_select.set_defaults(func=_cmd_select)

    p_ger = sub.add_parser("ger", help="correct an N-best file via the configured backend")
    p_ger.add_argument("nbest_file")
    p_ger.add_argument(
        "--reference-file", help="annotated transcript, required by the oracle backend"
    )
    _add_config_flags(p_ger)
    p_ger.set_defaults(func=_cmd_ger)

    p_score = sub.add_parser("score", help="score a hypothesis file against a reference file")
    p_score.add_argument("hyp_file")
    p_score.add_argument("ref_file", help="annotated transcript")
    _add_config_flags(p_score)
    p_score.set_defaults(func=_cmd_score)

    p_pipe = sub.add_parser("pipeline", help="run a manifest end to end and emit a report")
    p_pipe.add_argument("manifest")
    p_pipe.add_argument("--records-out", help="also write per-utterance records as JSON Lines")
    _add_config_flags(p_pipe)
    p_pipe.set_defaults(func=_cmd_pipeline)

    p_plan = sub.add_parser("augment-plan", help="emit deterministic augmentation plans")
    p_plan.add_argument("manifest")
    p_plan.add_argument("--noise-dir", required=True, help="directory of noise WAV files")
    _add_config_flags(p_plan)
    p_plan.set_defaults(func=_cmd_augment_plan)

    p_apply = sub.add_parser("augment-apply", help="execute augmentation plans on audio")
    p_apply.add_argument("plans", help="plans file from augment-plan")
    p_apply.add_argument("manifest")
    p_apply.add_argument("--noise-dir", required=True, help="directory of noise WAV files")
    p_apply.add_argument("--out-dir", required=True, help="directory for augmented WAV files")
    _add_config_flags(p_apply)
    p_apply.set_defaults(func=_cmd_augment_apply)

    p_report = sub.add_parser("report", help="render a records file as a category report")
    p_report.add_argument("records")
    _add_config_flags(p_report)
    p_report.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GerkitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILED
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
