"""Generation service implementing the correction-prompt contract.

POST /generate with {"prompt", "max_new_tokens", "temperature"} returns
{"text": ...}.  Prompts longer than the model's context limit are rejected
with a 400 carrying a length diagnostic; model failures surface as 500 with
the underlying message.

The built-in model is a deterministic stand-in: it reads the bulleted
hypotheses out of the prompt and returns the one whose words are most
agreed upon across bullets.  At temperature 0 that choice is a pure
function of the prompt, so repeated calls are identical.
"""

from __future__ import annotations

import random
from collections import Counter
from typing import Protocol

import uvicorn
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import AdapterConfig, AdapterConfigError
from .service import BadRequestError, error_response, json_object_body, optional_int

DEFAULT_MODEL_ID = "consensus-v1"

_BULLET = "- "


class GenerationModel(Protocol):
    max_prompt_chars: int

    def generate(self, prompt: str, max_new_tokens: int, temperature: float) -> str:
        ...


class ConsensusGerModel:
    """Deterministic correction stand-in.

    Candidates are the prompt's bulleted lines.  Each is scored by the mean
    corpus frequency of its words across all candidates; temperature 0 takes
    the best (earliest bullet on ties), temperature > 0 samples weighted by
    the same score.  A prompt with no bullets yields an empty transcription.
    """

    def __init__(self, max_prompt_chars: int = 32768):
        self.max_prompt_chars = max_prompt_chars

    def generate(self, prompt: str, max_new_tokens: int, temperature: float) -> str:
        candidates = [line[len(_BULLET):] for line in prompt.split("\n") if line.startswith(_BULLET)]
        if not candidates:
            return ""
        freq = Counter(token for c in candidates for token in c.lower().split())

        def agreement(candidate: str) -> float:
            tokens = candidate.lower().split()
            if not tokens:
                return 0.0
            return sum(freq[t] for t in tokens) / len(tokens)

        if temperature == 0.0:
            best = max(candidates, key=agreement)
        else:
            weights = [agreement(c) + 1e-9 for c in candidates]
            best = random.choices(candidates, weights=weights)[0]
        return " ".join(best.split()[:max_new_tokens])


def load_generation_model(config: AdapterConfig) -> GenerationModel:
    if config.model_id == DEFAULT_MODEL_ID:
        return ConsensusGerModel()
    raise AdapterConfigError(
        f"unknown generation model {config.model_id!r}; available: {DEFAULT_MODEL_ID}"
    )


def create_ger_app(config: AdapterConfig, model: GenerationModel | None = None) -> FastAPI:
    """Build the service; loading the configured model fails fast here."""
    model = model if model is not None else load_generation_model(config)
    app = FastAPI(title="gerkit-adapters ger")

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "model": config.model_id}

    @app.post("/generate")
    async def generate(request: Request):
        try:
            body = await json_object_body(request)
            prompt = body.get("prompt")
            if not isinstance(prompt, str):
                raise BadRequestError("'prompt' must be a string")
            if len(prompt) > model.max_prompt_chars:
                raise BadRequestError(
                    f"prompt length {len(prompt)} exceeds the model limit of "
                    f"{model.max_prompt_chars} characters"
                )
            max_new_tokens = min(
                optional_int(body, "max_new_tokens", config.max_new_tokens),
                config.max_new_tokens,
            )
            temperature = body.get("temperature", 0.0)
            if isinstance(temperature, bool) or not isinstance(temperature, (int, float)):
                raise BadRequestError("'temperature' must be a number")
            if temperature < 0:
                raise BadRequestError(f"'temperature' must be >= 0, got {temperature}")
        except BadRequestError as exc:
            return error_response(400, str(exc))
        try:
            text = model.generate(prompt, max_new_tokens, float(temperature))
        except Exception as exc:
            return error_response(500, f"model failure: {exc}")
        return JSONResponse({"text": text})

    return app


def serve_ger(config: AdapterConfig, host: str = "127.0.0.1"):
    """Run the generation service until interrupted."""
    uvicorn.run(create_ger_app(config), host=host, port=config.port)
