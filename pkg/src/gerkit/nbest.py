"""N-best hypothesis containers, rank-wise segment concatenation, normalized
edit distance, and maximin diversity selection.

Long recordings are decoded per voice-activity segment; ``concat_segments``
recombines them rank by rank (all rank-1 texts joined, all rank-2 texts
joined, ...).  ``select_diverse`` then picks ``k`` hypotheses from the pool:
the top-ranked one is always kept, and the rest are chosen greedily to
maximize the minimum normalized edit distance to everything already chosen,
so the pool represents genuinely different readings instead of near
duplicates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import GerkitError
from .transcript import normalized_text


class EmptySegmentsError(GerkitError):
    pass


class InvalidKError(GerkitError):
    pass


class MalformedDocumentError(GerkitError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class DuplicateRankError(GerkitError):
    pass


class RankGapError(GerkitError):
    pass


@dataclass(frozen=True)
class Hypothesis:
    """One ranked transcription candidate; rank 1 is the decoder's best."""

    rank: int
    text: str
    score: float | None = None

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be >= 1, got {self.rank}")


def _validated_ranks(hypotheses: Iterable[Hypothesis], where: str) -> tuple[Hypothesis, ...]:
    ordered = tuple(sorted(hypotheses, key=lambda h: h.rank))
    seen: set[int] = set()
    for h in ordered:
        if h.rank in seen:
            raise DuplicateRankError(f"{where}: duplicate rank {h.rank}")
        seen.add(h.rank)
    for expected, h in enumerate(ordered, start=1):
        if h.rank != expected:
            raise RankGapError(f"{where}: ranks must be 1..n, missing rank {expected}")
    for prev, cur in zip(ordered, ordered[1:]):
        if prev.score is not None and cur.score is not None and cur.score > prev.score:
            raise MalformedDocumentError(where, f"score at rank {cur.rank} exceeds rank {prev.rank}")
    return ordered


@dataclass
class NBestList:
    utterance_id: str
    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        self.hypotheses = _validated_ranks(self.hypotheses, f"nbest[{self.utterance_id}]")


@dataclass
class Segment:
    """Hypotheses for one voice-activity segment of a recording."""

    hypotheses: tuple[Hypothesis, ...]
    start_s: float | None = None
    end_s: float | None = None

    def __post_init__(self):
        self.hypotheses = _validated_ranks(self.hypotheses, "segment")


@dataclass
class SegmentedNBest:
    """Per-segment N-best lists for one utterance, in temporal order.

    A document with zero segments is accepted at parse time (a silence-only
    recording produces no segments); ``concat_segments`` rejects it.
    """

    utterance_id: str
    segments: tuple[Segment, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.segments = tuple(self.segments)


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of diversity selection over one hypothesis pool.

    ``selected`` holds (original rank, text) pairs in ascending rank order,
    ready for prompting; ``selection_order`` records the greedy pick order.
    """

    source_n: int
    k: int
    selected: tuple[tuple[int, str], ...]
    selection_order: tuple[int, ...]


def concat_segments(s: SegmentedNBest) -> NBestList:
    """Join per-segment hypotheses rank-wise into one N-best list.

    The result has as many hypotheses as the largest segment; a shorter
    segment contributes its last-ranked text for the missing ranks (an
    empty segment contributes an empty string).  Scores do not survive
    concatenation.
    """
    if not s.segments:
        raise EmptySegmentsError(f"no segments for utterance {s.utterance_id!r}")
    n_star = max(len(seg.hypotheses) for seg in s.segments)
    merged = []
    for rank in range(1, n_star + 1):
        parts = []
        for seg in s.segments:
            if not seg.hypotheses:
                parts.append("")
            else:
                parts.append(seg.hypotheses[min(rank, len(seg.hypotheses)) - 1].text)
        merged.append(Hypothesis(rank=rank, text=" ".join(parts)))
    return NBestList(utterance_id=s.utterance_id, hypotheses=tuple(merged))


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance over characters or token sequences."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        append = cur.append
        for j, cb in enumerate(b, start=1):
            append(min(prev[j] + 1, cur[-1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_edit_distance(a: str, b: str) -> float:
    """Levenshtein distance divided by the longer length, in [0, 1].

    Defined as 0 when both strings are empty.
    """
    if a == b:
        return 0.0
    return levenshtein(a, b) / max(len(a), len(b))


def select_diverse(nbest: NBestList, k: int) -> SelectionResult:
    """Pick ``k`` diverse hypotheses by greedy farthest-point selection.

    Rank 1 seeds the selection; each further pick maximizes the minimum
    normalized edit distance (computed on normalized text) to the already
    selected set, with ties broken by lowest original rank.  When the pool
    has at most ``k`` entries everything is selected.
    """
    if k < 1:
        raise InvalidKError(f"k must be >= 1, got {k}")
    hyps = nbest.hypotheses
    n = len(hyps)
    if n <= k:
        return SelectionResult(
            source_n=n,
            k=k,
            selected=tuple((h.rank, h.text) for h in hyps),
            selection_order=tuple(h.rank for h in hyps),
        )

    norm = [normalized_text(h.text) for h in hyps]
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = normalized_edit_distance(norm[i], norm[j])
            dist[i][j] = dist[j][i] = d

    chosen = [0]
    in_set = {0}
    min_dist = list(dist[0])
    while len(chosen) < k:
        best = -1
        best_d = -1.0
        for i in range(n):
            if i in in_set:
                continue
            if min_dist[i] > best_d:
                best, best_d = i, min_dist[i]
        chosen.append(best)
        in_set.add(best)
        row = dist[best]
        for i in range(n):
            if row[i] < min_dist[i]:
                min_dist[i] = row[i]

    selection_order = tuple(hyps[i].rank for i in chosen)
    selected = tuple(sorted((hyps[i].rank, hyps[i].text) for i in chosen))
    return SelectionResult(source_n=n, k=k, selected=selected, selection_order=selection_order)


def _require(condition: bool, path: str, message: str):
    if not condition:
        raise MalformedDocumentError(path, message)


def _number_or_none(value, path: str) -> float | None:
    if value is None:
        return None
    _require(isinstance(value, (int, float)) and not isinstance(value, bool), path, "expected a number or null")
    return float(value)


def _hypothesis_from_dict(obj, path: str) -> Hypothesis:
    _require(isinstance(obj, dict), path, "expected an object")
    _require("rank" in obj, path, "missing field 'rank'")
    _require("text" in obj, path, "missing field 'text'")
    rank = obj["rank"]
    _require(isinstance(rank, int) and not isinstance(rank, bool), f"{path}.rank", "expected an integer")
    _require(rank >= 1, f"{path}.rank", f"rank must be >= 1, got {rank}")
    text = obj["text"]
    _require(isinstance(text, str), f"{path}.text", "expected a string")
    _require("\n" not in text and "\r" not in text, f"{path}.text", "hypothesis text must not contain newlines")
    score = _number_or_none(obj.get("score"), f"{path}.score")
    return Hypothesis(rank=rank, text=text, score=score)


def _segment_from_dict(obj, path: str) -> Segment:
    _require(isinstance(obj, dict), path, "expected an object")
    _require("hypotheses" in obj, path, "missing field 'hypotheses'")
    raw_hyps = obj["hypotheses"]
    _require(isinstance(raw_hyps, list), f"{path}.hypotheses", "expected a list")
    hyps = [_hypothesis_from_dict(h, f"{path}.hypotheses[{i}]") for i, h in enumerate(raw_hyps)]
    ranks = sorted(h.rank for h in hyps)
    for a, b in zip(ranks, ranks[1:]):
        if a == b:
            raise DuplicateRankError(f"{path}: duplicate rank {a}")
    for expected, got in enumerate(ranks, start=1):
        if got != expected:
            raise RankGapError(f"{path}: ranks must be 1..n, missing rank {expected}")
    return Segment(
        hypotheses=tuple(hyps),
        start_s=_number_or_none(obj.get("start_s"), f"{path}.start_s"),
        end_s=_number_or_none(obj.get("end_s"), f"{path}.end_s"),
    )


def nbest_from_dict(obj) -> SegmentedNBest:
    _require(isinstance(obj, dict), "$", "expected a JSON object")
    _require("utterance_id" in obj, "$", "missing field 'utterance_id'")
    _require(isinstance(obj["utterance_id"], str), "$.utterance_id", "expected a string")
    _require("segments" in obj, "$", "missing field 'segments'")
    _require(isinstance(obj["segments"], list), "$.segments", "expected a list")
    segments = tuple(
        _segment_from_dict(seg, f"$.segments[{i}]") for i, seg in enumerate(obj["segments"])
    )
    return SegmentedNBest(utterance_id=obj["utterance_id"], segments=segments)


def nbest_to_dict(s: SegmentedNBest) -> dict:
    return {
        "utterance_id": s.utterance_id,
        "segments": [
            {
                "start_s": seg.start_s,
                "end_s": seg.end_s,
                "hypotheses": [
                    {"rank": h.rank, "text": h.text, "score": h.score}
                    for h in seg.hypotheses
                ],
            }
            for seg in s.segments
        ],
    }


def parse_nbest_file(data: bytes | str) -> SegmentedNBest:
    """Parse one N-best wire-format document (UTF-8 JSON)."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocumentError("$", f"not valid UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocumentError("$", f"not valid JSON: {exc}") from exc
    return nbest_from_dict(obj)


def write_nbest_file(s: SegmentedNBest) -> bytes:
    """Serialize one document; round-trips with ``parse_nbest_file``."""
    return json.dumps(nbest_to_dict(s), ensure_ascii=False).encode("utf-8")


def parse_nbest_lines(data: bytes | str) -> list[SegmentedNBest]:
    """Parse a JSON Lines batch (one document per line; blank lines skipped)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    docs = []
    for line_no, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            docs.append(parse_nbest_file(line))
        except MalformedDocumentError as exc:
            raise MalformedDocumentError(f"line {line_no} {exc.path}", str(exc)) from exc
    return docs
