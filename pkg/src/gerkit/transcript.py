"""Annotated-transcript parsing and reference derivation.

Transcripts carry two kinds of markup: the elicitation prompt in square
brackets ("[What is your favorite pet?]") and in-recording speech events in
round brackets.  Round-bracket spans are plain disfluencies such as partial
word attempts ("(che- che-) checkout", "(d-*) demo"), interviewer speech
tagged "(cs: ...)", or speaker asides tagged "(ss: ...)".

From one parsed transcript three texts are derived:

* ``asr_target`` / ``verbatim_reference`` - prompt removed, every
  round-bracket span kept verbatim (parentheses included).
* ``clean_reference`` - prompt and all round-bracket spans removed.

Removed spans are replaced by a single space before whitespace collapsing,
so words on either side of an annotation never merge.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import GerkitError


class SpanKind(Enum):
    PROMPT_CONTEXT = "prompt_context"
    DISFLUENCY = "disfluency"
    INTERVIEWER_SPEECH = "interviewer_speech"
    SPEAKER_ASIDE = "speaker_aside"


class UnbalancedBracketsError(GerkitError):
    def __init__(self, position: int, message: str):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NestedBracketsError(GerkitError):
    def __init__(self, position: int):
        super().__init__(f"nested brackets are not supported, at position {position}")
        self.position = position


@dataclass(frozen=True)
class AnnotationSpan:
    """One bracketed region of the raw text.

    ``start``/``end`` are half-open character offsets covering the span
    including its delimiters; ``inner`` is the content with delimiters and
    any "cs:"/"ss:" tag prefix stripped.
    """

    kind: SpanKind
    start: int
    end: int
    inner: str


@dataclass(frozen=True)
class AnnotatedTranscript:
    raw: str
    spans: tuple[AnnotationSpan, ...]

    def reconstruct(self) -> str:
        """Rebuild the raw text from gap text plus span slices."""
        pieces = []
        cursor = 0
        for span in self.spans:
            pieces.append(self.raw[cursor:span.start])
            pieces.append(self.raw[span.start:span.end])
            cursor = span.end
        pieces.append(self.raw[cursor:])
        return "".join(pieces)


_TAG_RE = re.compile(r"^(cs|ss):\s*", re.IGNORECASE)
_WS_RE = re.compile(r"\s+")
_BRACKET_CHARS_RE = re.compile(r"[()\[\]]")
_DROPPED_CHARS_RE = re.compile(r"[^a-z0-9*\-\s]")
_KEEPABLE_RE = re.compile(r"[a-z0-9*]")


def _classify_round(raw: str, start: int, end: int) -> AnnotationSpan:
    body = raw[start + 1:end - 1]
    m = _TAG_RE.match(body)
    if m:
        kind = (
            SpanKind.INTERVIEWER_SPEECH
            if m.group(1).lower() == "cs"
            else SpanKind.SPEAKER_ASIDE
        )
        return AnnotationSpan(kind=kind, start=start, end=end, inner=body[m.end():])
    return AnnotationSpan(kind=SpanKind.DISFLUENCY, start=start, end=end, inner=body)


def parse_annotations(raw: str) -> AnnotatedTranscript:
    """Parse bracketed annotations out of ``raw``.

    Raises ``UnbalancedBracketsError`` for stray or unclosed delimiters and
    ``NestedBracketsError`` when a bracket opens inside another span.
    """
    spans: list[AnnotationSpan] = []
    open_char: str | None = None
    open_pos = 0
    for i, ch in enumerate(raw):
        if ch in "[(":
            if open_char is not None:
                raise NestedBracketsError(i)
            open_char, open_pos = ch, i
        elif ch in "])":
            if open_char is None:
                raise UnbalancedBracketsError(i, f"closing '{ch}' without matching opener")
            if (ch == "]") != (open_char == "["):
                raise UnbalancedBracketsError(i, f"closing '{ch}' does not match open '{open_char}'")
            if open_char == "[":
                spans.append(
                    AnnotationSpan(
                        kind=SpanKind.PROMPT_CONTEXT,
                        start=open_pos,
                        end=i + 1,
                        inner=raw[open_pos + 1:i],
                    )
                )
            else:
                spans.append(_classify_round(raw, open_pos, i + 1))
            open_char = None
    if open_char is not None:
        raise UnbalancedBracketsError(open_pos, f"unclosed '{open_char}'")
    return AnnotatedTranscript(raw=raw, spans=tuple(spans))


def _substitute_spans(t: AnnotatedTranscript, keep_round: bool) -> str:
    pieces = []
    cursor = 0
    for span in t.spans:
        pieces.append(t.raw[cursor:span.start])
        if keep_round and span.kind is not SpanKind.PROMPT_CONTEXT:
            pieces.append(t.raw[span.start:span.end])
        else:
            pieces.append(" ")
        cursor = span.end
    pieces.append(t.raw[cursor:])
    return _WS_RE.sub(" ", "".join(pieces)).strip()


def asr_target(t: AnnotatedTranscript) -> str:
    """Training/decoding target: prompt removed, round-bracket spans verbatim."""
    return _substitute_spans(t, keep_round=True)


def verbatim_reference(t: AnnotatedTranscript) -> str:
    """The with-disfluencies evaluation reference (identical to the target)."""
    return asr_target(t)


def clean_reference(t: AnnotatedTranscript) -> str:
    """The without-disfluencies evaluation reference: all spans removed."""
    return _substitute_spans(t, keep_round=False)


def normalize_tokens(s: str) -> list[str]:
    """Lowercase, strip punctuation, and split into tokens.

    Hyphens and asterisks survive because they mark partial word attempts
    ("che-", "d-*"); parentheses and square brackets act as token
    separators; all other punctuation is dropped in place.  Tokens left
    with no alphanumeric or asterisk content (e.g. a bare "-") are dropped.
    """
    s = _BRACKET_CHARS_RE.sub(" ", s.lower())
    s = _DROPPED_CHARS_RE.sub("", s)
    return [tok for tok in s.split() if _KEEPABLE_RE.search(tok)]


def normalized_text(s: str) -> str:
    """Canonical single-spaced form of ``s`` used for edit distances."""
    return " ".join(normalize_tokens(s))
