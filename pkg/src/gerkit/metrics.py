"""Word error rate with alignment breakdown, the dual-reference scoring
rule, and the weighted three-component semantic score.

Each utterance is scored against two references (verbatim, i.e. with
disfluencies, and clean, without them); the one at lower normalized edit
distance from the hypothesis is used for both metrics, ties going to the
verbatim reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .errors import GerkitError
from .nbest import normalized_edit_distance
from .scorers import Scorer
from .transcript import normalized_text, normalize_tokens


class Category(Enum):
    """Utterance category: digital assistant commands, sentences from
    novels, spontaneous speech, single words."""

    DAC = "DAC"
    SN = "SN"
    SS = "SS"
    SW = "SW"


CATEGORY_ORDER = (Category.DAC, Category.SN, Category.SS, Category.SW)


class EmptyInputError(GerkitError):
    pass


class InvalidWeightsError(GerkitError):
    pass


class ScorerFailureError(GerkitError):
    def __init__(self, component: str, cause: str):
        super().__init__(f"scorer '{component}' failed: {cause}")
        self.component = component


@dataclass(frozen=True)
class WerBreakdown:
    substitutions: int
    deletions: int
    insertions: int
    hits: int
    ref_len: int
    wer: float

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @classmethod
    def from_counts(cls, substitutions: int, deletions: int, insertions: int, hits: int) -> "WerBreakdown":
        ref_len = hits + substitutions + deletions
        return cls(
            substitutions=substitutions,
            deletions=deletions,
            insertions=insertions,
            hits=hits,
            ref_len=ref_len,
            wer=(substitutions + deletions + insertions) / max(1, ref_len),
        )


@dataclass(frozen=True)
class SemScoreWeights:
    w_semantic: float
    w_phonetic: float
    w_entailment: float

    def __post_init__(self):
        for name, w in (
            ("w_semantic", self.w_semantic),
            ("w_phonetic", self.w_phonetic),
            ("w_entailment", self.w_entailment),
        ):
            if not 0.0 <= w <= 1.0:
                raise InvalidWeightsError(f"{name} must be in [0, 1], got {w}")
        total = self.w_semantic + self.w_phonetic + self.w_entailment
        if not math.isclose(total, 1.0, abs_tol=1e-9):
            raise InvalidWeightsError(f"weights must sum to 1, got {total}")


DEFAULT_WEIGHTS = SemScoreWeights(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def wer(ref: Sequence[str], hyp: Sequence[str]) -> WerBreakdown:
    """Minimal-cost word alignment of ``hyp`` against ``ref``.

    Counts come from one optimal Levenshtein alignment; when several
    alignments share the minimal cost the backtrace prefers
    hit > substitution > deletion > insertion, so breakdowns are
    deterministic.
    """
    m, n = len(ref), len(hyp)
    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dp[i][0] = i
    for j in range(1, n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        row = dp[i]
        prev_row = dp[i - 1]
        r = ref[i - 1]
        for j in range(1, n + 1):
            row[j] = min(
                prev_row[j - 1] + (r != hyp[j - 1]),
                prev_row[j] + 1,
                row[j - 1] + 1,
            )

    hits = subs = dels = ins = 0
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0 and ref[i - 1] == hyp[j - 1] and dp[i - 1][j - 1] == dp[i][j]:
            hits += 1
            i -= 1
            j -= 1
        elif i > 0 and j > 0 and dp[i - 1][j - 1] + 1 == dp[i][j]:
            subs += 1
            i -= 1
            j -= 1
        elif i > 0 and dp[i - 1][j] + 1 == dp[i][j]:
            dels += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return WerBreakdown.from_counts(subs, dels, ins, hits)


def semscore(
    hyp: str,
    ref: str,
    scorers: Mapping[str, Scorer],
    weights: SemScoreWeights = DEFAULT_WEIGHTS,
) -> float:
    """Weighted combination of the three components, scaled to [0, 100].

    A component failure is propagated as ``ScorerFailureError``; it is
    never silently skipped.
    """
    values = {}
    for component in ("semantic", "phonetic", "entailment"):
        scorer = scorers.get(component)
        if scorer is None:
            raise ScorerFailureError(component, "no scorer configured")
        try:
            raw = scorer.score(hyp, ref)
        except GerkitError as exc:
            raise ScorerFailureError(component, str(exc)) from exc
        except Exception as exc:  # scorer bug or transport surprise
            raise ScorerFailureError(component, repr(exc)) from exc
        values[component] = min(1.0, max(0.0, raw))
    return 100.0 * (
        weights.w_semantic * values["semantic"]
        + weights.w_phonetic * values["phonetic"]
        + weights.w_entailment * values["entailment"]
    )


@dataclass(frozen=True)
class DualReferenceScore:
    """Scores for one hypothesis against the nearer of the two references."""

    chosen_reference: str  # "verbatim" or "clean"
    reference_text: str
    verbatim_distance: float
    clean_distance: float
    wer: WerBreakdown
    semscore: float


def dual_reference_evaluate(
    hyp: str,
    verbatim: str,
    clean: str,
    weights: SemScoreWeights,
    scorers: Mapping[str, Scorer],
) -> DualReferenceScore:
    """Score ``hyp`` against whichever reference is closer.

    Distances are character-level normalized edit distances on normalized
    text; the chosen reference is used for BOTH the word error rate and the
    semantic score.  A tie selects the verbatim reference.
    """
    hyp_norm = normalized_text(hyp)
    d_verbatim = normalized_edit_distance(hyp_norm, normalized_text(verbatim))
    d_clean = normalized_edit_distance(hyp_norm, normalized_text(clean))
    if d_verbatim <= d_clean:
        chosen, reference = "verbatim", verbatim
    else:
        chosen, reference = "clean", clean
    breakdown = wer(normalize_tokens(reference), normalize_tokens(hyp))
    return DualReferenceScore(
        chosen_reference=chosen,
        reference_text=reference,
        verbatim_distance=d_verbatim,
        clean_distance=d_clean,
        wer=breakdown,
        semscore=semscore(hyp, reference, scorers, weights),
    )


@dataclass(frozen=True)
class EvaluationRecord:
    utterance_id: str
    category: Category
    chosen_reference: str
    wer: WerBreakdown
    semscore: float


def record_to_dict(record: EvaluationRecord) -> dict:
    return {
        "utterance_id": record.utterance_id,
        "category": record.category.value,
        "chosen_reference": record.chosen_reference,
        "wer": {
            "substitutions": record.wer.substitutions,
            "deletions": record.wer.deletions,
            "insertions": record.wer.insertions,
            "hits": record.wer.hits,
            "ref_len": record.wer.ref_len,
            "wer": record.wer.wer,
        },
        "semscore": record.semscore,
    }


def record_from_dict(obj: dict) -> EvaluationRecord:
    w = obj["wer"]
    return EvaluationRecord(
        utterance_id=obj["utterance_id"],
        category=Category(obj["category"]),
        chosen_reference=obj["chosen_reference"],
        wer=WerBreakdown(
            substitutions=w["substitutions"],
            deletions=w["deletions"],
            insertions=w["insertions"],
            hits=w["hits"],
            ref_len=w["ref_len"],
            wer=w["wer"],
        ),
        semscore=obj["semscore"],
    )


@dataclass(frozen=True)
class CategoryStats:
    count: int
    errors: int
    ref_len: int
    wer: float  # micro-averaged, as a percentage
    semscore: float  # arithmetic mean


@dataclass(frozen=True)
class CategoryReport:
    categories: dict[Category, CategoryStats]
    overall: CategoryStats


def _stats(records: Sequence[EvaluationRecord]) -> CategoryStats:
    errors = sum(r.wer.errors for r in records)
    ref_len = sum(r.wer.ref_len for r in records)
    return CategoryStats(
        count=len(records),
        errors=errors,
        ref_len=ref_len,
        wer=100.0 * errors / max(1, ref_len),
        semscore=sum(r.semscore for r in records) / len(records),
    )


def aggregate_report(records: Sequence[EvaluationRecord]) -> CategoryReport:
    """Micro-averaged WER and mean semantic score, per category and overall.

    Categories without records are omitted.
    """
    if not records:
        raise EmptyInputError("no evaluation records to aggregate")
    categories = {}
    for category in CATEGORY_ORDER:
        matching = [r for r in records if r.category is category]
        if matching:
            categories[category] = _stats(matching)
    return CategoryReport(categories=categories, overall=_stats(records))
