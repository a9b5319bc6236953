"""Pluggable similarity scorers for the composite semantic score.

Three components are expected: "semantic", "phonetic", and "entailment".
The phonetic scorer ships as a native implementation built on a
Metaphone-family phonetic code.  Semantic similarity and entailment need
external models to be faithful, so they come in two flavours:

* ``RemoteScorer`` - client for a scoring service (POST /score).
* ``LexicalOverlapScorer`` / ``LexicalEntailmentScorer`` - degenerate
  token-overlap fallbacks, clearly non-faithful but dependency-free, so
  the pipeline runs end to end without external services.

Every scorer maps ``(hypothesis text, reference text)`` to a value in
[0, 1]; outputs are clamped to that range.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections import Counter
from typing import Sequence

from . import remote
from .nbest import normalized_edit_distance
from .transcript import normalize_tokens

_VOWELS = "aeiou"

# Word-initial spellings whose first letter is silent (or respelled).
_INITIAL_DROP = ("ae", "gn", "kn", "pn", "wr")


def _metaphone(token: str) -> str:
    """Primary phonetic code for one token (Metaphone-family rules).

    Letters-only tokens get a consonant-class code; tokens without letters
    (e.g. "42") fall back to their alphanumeric characters so numbers stay
    distinguishable.
    """
    word = "".join(c for c in token if c.isalpha())
    if not word:
        return "".join(c for c in token if c.isalnum())

    if word[:2] in _INITIAL_DROP:
        word = word[1:]
    elif word.startswith("wh"):
        word = "w" + word[2:]
    elif word.startswith("x"):
        word = "s" + word[1:]

    out: list[str] = []
    i = 0
    n = len(word)
    while i < n:
        c = word[i]
        if i > 0 and c == word[i - 1] and c != "c":
            i += 1
            continue
        nxt = word[i + 1] if i + 1 < n else ""
        nxt2 = word[i + 2] if i + 2 < n else ""
        step = 1
        if c in _VOWELS:
            if i == 0:
                out.append("A")
        elif c == "b":
            if not (i == n - 1 and i > 0 and word[i - 1] == "m"):
                out.append("B")
        elif c == "c":
            if nxt == "h":
                out.append("K" if i > 0 and word[i - 1] == "s" else "X")
                step = 2
            elif nxt == "i" and nxt2 == "a":
                out.append("X")
            elif nxt in "iey":
                out.append("S")
            else:
                out.append("K")
        elif c == "d":
            if nxt == "g" and nxt2 in "eiy":
                out.append("J")
                step = 2
            else:
                out.append("T")
        elif c == "f":
            out.append("F")
        elif c == "g":
            if nxt == "h":
                if i == 0:
                    out.append("K")
                step = 2
            elif nxt == "n":
                pass
            elif nxt in "iey":
                out.append("J")
            else:
                out.append("K")
        elif c == "h":
            if nxt in _VOWELS and (i == 0 or word[i - 1] not in _VOWELS):
                out.append("H")
        elif c == "j":
            out.append("J")
        elif c == "k":
            if not (i > 0 and word[i - 1] == "c"):
                out.append("K")
        elif c in "lmnr":
            out.append(c.upper())
        elif c == "p":
            if nxt == "h":
                out.append("F")
                step = 2
            else:
                out.append("P")
        elif c == "q":
            out.append("K")
        elif c == "s":
            if nxt == "h":
                out.append("X")
                step = 2
            elif nxt == "i" and nxt2 in "oa":
                out.append("X")
            else:
                out.append("S")
        elif c == "t":
            if nxt == "h":
                out.append("0")
                step = 2
            elif nxt == "i" and nxt2 in "oa":
                out.append("X")
            else:
                out.append("T")
        elif c == "v":
            out.append("F")
        elif c == "w":
            if nxt in _VOWELS:
                out.append("W")
        elif c == "x":
            out.append("KS")
        elif c == "y":
            if nxt in _VOWELS:
                out.append("Y")
        elif c == "z":
            out.append("S")
        i += step
    return "".join(out)


def encode_phonetic(text: str) -> str:
    """Phonetic encoding of a whole text: per-token codes joined by spaces."""
    codes = [_metaphone(tok) for tok in normalize_tokens(text)]
    return " ".join(code for code in codes if code)


def _clamp01(value: float) -> float:
    return min(1.0, max(0.0, value))


class Scorer(ABC):
    """A named component mapping (hypothesis, reference) to [0, 1]."""

    name: str

    @abstractmethod
    def score(self, hyp: str, ref: str) -> float:
        ...

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        return [self.score(hyp, ref) for hyp, ref in pairs]


class PhoneticScorer(Scorer):
    """1 minus the normalized edit distance between phonetic encodings."""

    name = "phonetic"

    def score(self, hyp: str, ref: str) -> float:
        return _clamp01(1.0 - normalized_edit_distance(encode_phonetic(hyp), encode_phonetic(ref)))


def _overlap_f1(hyp_tokens: list[str], ref_tokens: list[str]) -> float:
    if not hyp_tokens and not ref_tokens:
        return 1.0
    if not hyp_tokens or not ref_tokens:
        return 0.0
    overlap = sum((Counter(hyp_tokens) & Counter(ref_tokens)).values())
    return 2.0 * overlap / (len(hyp_tokens) + len(ref_tokens))


class LexicalOverlapScorer(Scorer):
    """Token-overlap F1.  Degenerate stand-in for a semantic-similarity
    model; NOT faithful to embedding-based scoring."""

    name = "lexical-overlap"

    def score(self, hyp: str, ref: str) -> float:
        return _clamp01(_overlap_f1(normalize_tokens(hyp), normalize_tokens(ref)))


class LexicalEntailmentScorer(Scorer):
    """1.0 when normalized texts match, token-overlap F1 otherwise.
    Degenerate stand-in for an NLI entailment model; NOT faithful."""

    name = "lexical-entailment"

    def score(self, hyp: str, ref: str) -> float:
        hyp_tokens = normalize_tokens(hyp)
        ref_tokens = normalize_tokens(ref)
        if hyp_tokens == ref_tokens:
            return 1.0
        return _clamp01(_overlap_f1(hyp_tokens, ref_tokens))


class RemoteScorer(Scorer):
    """Client for a scoring service.

    Contract: POST {endpoint}/score with
    ``{"component": ..., "pairs": [{"hyp": ..., "ref": ...}, ...]}``
    returning ``{"scores": [...]}`` aligned with the pairs.  Stateless per
    call, so instances are safe to share across threads.
    """

    def __init__(self, component: str, endpoint: str, timeout_s: float = 30.0):
        if component not in ("semantic", "entailment"):
            raise ValueError(f"unsupported remote component {component!r}")
        self.name = f"remote-{component}"
        self.component = component
        self.url = endpoint.rstrip("/") + "/score"
        self.timeout_s = timeout_s

    def score(self, hyp: str, ref: str) -> float:
        return self.score_batch([(hyp, ref)])[0]

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        payload = {
            "component": self.component,
            "pairs": [{"hyp": hyp, "ref": ref} for hyp, ref in pairs],
        }
        obj = remote.post_json(self.url, payload, self.timeout_s)
        scores = obj.get("scores")
        if not isinstance(scores, list) or len(scores) != len(pairs):
            raise remote.MalformedResponseError(
                f"{self.url}: 'scores' must be a list of {len(pairs)} numbers"
            )
        out = []
        for i, value in enumerate(scores):
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise remote.MalformedResponseError(f"{self.url}: scores[{i}] is not a number")
            out.append(_clamp01(float(value)))
        return out
