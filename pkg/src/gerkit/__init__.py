"""Toolkit for two-stage ASR error correction on disordered speech.

Stage 1 produces N-best hypotheses (consumed here as documents); stage 2
selects a diverse subset, prompts a correction backend, and scores the
result against dual references with WER and SemScore.
"""

from .augment import (
    AugmentationPlan,
    AugmentConfig,
    DirectoryNoiseLoader,
    PcmBuffer,
    apply_plan,
    mix_noise_at_edge,
    plan_augmentation,
    read_plans,
    time_stretch,
    write_plans,
)
from .config import PipelineConfig, build_config
from .errors import GerkitError
from .ger import (
    INSTRUCTION,
    CorrectionResult,
    GerPrompt,
    OracleBackend,
    PassthroughBackend,
    RemoteBackend,
    build_prompt,
    prompt_hypotheses,
)
from .manifest import ManifestRow, ingest_manifest
from .metrics import (
    DEFAULT_WEIGHTS,
    Category,
    CategoryReport,
    DualReferenceScore,
    EvaluationRecord,
    SemScoreWeights,
    WerBreakdown,
    aggregate_report,
    dual_reference_evaluate,
    semscore,
    wer,
)
from .nbest import (
    Hypothesis,
    NBestList,
    Segment,
    SegmentedNBest,
    SelectionResult,
    concat_segments,
    levenshtein,
    normalized_edit_distance,
    parse_nbest_file,
    select_diverse,
    write_nbest_file,
)
from .pipeline import PipelineFailure, emit_report, fetch_nbest, run_pipeline
from .scorers import (
    LexicalEntailmentScorer,
    LexicalOverlapScorer,
    PhoneticScorer,
    RemoteScorer,
    Scorer,
    encode_phonetic,
)
from .transcript import (
    AnnotatedTranscript,
    AnnotationSpan,
    SpanKind,
    asr_target,
    clean_reference,
    normalize_tokens,
    normalized_text,
    parse_annotations,
    verbatim_reference,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotatedTranscript",
    "AnnotationSpan",
    "AugmentConfig",
    "AugmentationPlan",
    "Category",
    "CategoryReport",
    "CorrectionResult",
    "DEFAULT_WEIGHTS",
    "DirectoryNoiseLoader",
    "DualReferenceScore",
    "EvaluationRecord",
    "GerPrompt",
    "GerkitError",
    "Hypothesis",
    "INSTRUCTION",
    "LexicalEntailmentScorer",
    "LexicalOverlapScorer",
    "ManifestRow",
    "NBestList",
    "OracleBackend",
    "PassthroughBackend",
    "PcmBuffer",
    "PhoneticScorer",
    "PipelineConfig",
    "PipelineFailure",
    "RemoteBackend",
    "RemoteScorer",
    "Scorer",
    "Segment",
    "SegmentedNBest",
    "SelectionResult",
    "SemScoreWeights",
    "SpanKind",
    "WerBreakdown",
    "aggregate_report",
    "apply_plan",
    "asr_target",
    "build_config",
    "build_prompt",
    "clean_reference",
    "concat_segments",
    "dual_reference_evaluate",
    "emit_report",
    "encode_phonetic",
    "fetch_nbest",
    "ingest_manifest",
    "levenshtein",
    "mix_noise_at_edge",
    "normalize_tokens",
    "normalized_edit_distance",
    "normalized_text",
    "parse_annotations",
    "parse_nbest_file",
    "plan_augmentation",
    "prompt_hypotheses",
    "read_plans",
    "run_pipeline",
    "select_diverse",
    "semscore",
    "time_stretch",
    "verbatim_reference",
    "wer",
    "write_nbest_file",
    "write_plans",
]
