"""Prompt construction and correction backends.

The selected hypotheses are rendered into a fixed instruction-plus-bullets
prompt; a backend turns that prompt into a final transcription.  Three
backends ship with the package:

* ``PassthroughBackend`` - returns the original top-1 hypothesis (the
  no-correction baseline).
* ``OracleBackend`` - returns the bulleted hypothesis with the lowest word
  error rate against a supplied reference (evaluation-time upper bound).
* ``RemoteBackend`` - client for a generation service (POST /generate).

An empty correction is a legitimate transcription, never an error.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

from . import remote
from .errors import GerkitError
from .metrics import wer
from .nbest import SelectionResult
from .transcript import normalize_tokens

INSTRUCTION = (
    "Given the following n-best list of hypotheses from ASR, "
    "provide the correct transcription:"
)

_BULLET = "- "


class EmptySelectionError(GerkitError):
    pass


class MissingReferenceError(GerkitError):
    pass


@dataclass(frozen=True)
class GerPrompt:
    rendered: str
    hypothesis_count: int


@dataclass(frozen=True)
class CorrectionResult:
    utterance_id: str
    final_text: str
    selected: SelectionResult
    prompt: GerPrompt
    backend_name: str
    latency_s: float


def build_prompt(selected: SelectionResult) -> GerPrompt:
    """Render the instruction line plus one bullet per selected hypothesis,
    in original rank order."""
    if not selected.selected:
        raise EmptySelectionError("cannot build a prompt from an empty selection")
    lines = [INSTRUCTION]
    lines.extend(_BULLET + text for _, text in selected.selected)
    return GerPrompt(rendered="\n".join(lines), hypothesis_count=len(selected.selected))


def prompt_hypotheses(prompt: GerPrompt) -> list[str]:
    """Recover the bulleted hypothesis texts from a rendered prompt."""
    lines = prompt.rendered.split("\n")
    return [line[len(_BULLET):] for line in lines[1:]]


class GerBackend(ABC):
    """Turns a prompt into a corrected transcription.

    ``correct`` must tolerate concurrent calls for distinct utterances;
    failures surface as typed errors, never as pipeline aborts.
    """

    name: str

    @abstractmethod
    def correct(self, prompt: GerPrompt, reference: str | None = None) -> str:
        ...


class PassthroughBackend(GerBackend):
    """No correction: the first bulleted hypothesis (original top-1) wins."""

    name = "passthrough"

    def correct(self, prompt: GerPrompt, reference: str | None = None) -> str:
        return prompt_hypotheses(prompt)[0]


class OracleBackend(GerBackend):
    """Picks the bulleted hypothesis with the lowest WER against the
    reference; ties go to the earliest bullet.  Evaluation-time only."""

    name = "oracle"

    def correct(self, prompt: GerPrompt, reference: str | None = None) -> str:
        if reference is None:
            raise MissingReferenceError("oracle backend requires a reference transcription")
        ref_tokens = normalize_tokens(reference)
        best_text = ""
        best_wer = float("inf")
        for text in prompt_hypotheses(prompt):
            candidate = wer(ref_tokens, normalize_tokens(text)).wer
            if candidate < best_wer:
                best_text, best_wer = text, candidate
        return best_text


class RemoteBackend(GerBackend):
    """Client for a generation service.

    Contract: POST {endpoint}/generate with
    ``{"prompt": ..., "max_new_tokens": ..., "temperature": ...}``
    returning ``{"text": ...}``.  The response text is trimmed; a
    whitespace-only body is a valid empty transcription.
    """

    name = "remote"

    def __init__(
        self,
        endpoint: str,
        max_new_tokens: int = 256,
        temperature: float = 0.0,
        timeout_s: float = 60.0,
    ):
        self.url = endpoint.rstrip("/") + "/generate"
        self.max_new_tokens = max_new_tokens
        self.temperature = temperature
        self.timeout_s = timeout_s

    def correct(self, prompt: GerPrompt, reference: str | None = None) -> str:
        payload = {
            "prompt": prompt.rendered,
            "max_new_tokens": self.max_new_tokens,
            "temperature": self.temperature,
        }
        obj = remote.post_json(self.url, payload, self.timeout_s)
        text = obj.get("text")
        if not isinstance(text, str):
            raise remote.MalformedResponseError(f"{self.url}: 'text' must be a string")
        return text.strip()
