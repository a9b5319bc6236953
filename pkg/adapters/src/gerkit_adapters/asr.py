"""Transcription service emitting the N-best document wire format.

POST /transcribe with {"audio_path"|"audio_b64", "n_best"} returns one JSON
document: an energy-threshold voice-activity detector splits the recording
into chunks, the model decodes each chunk into ranked candidates, and one
wire segment is emitted per chunk.  A silence-only clip therefore yields a
document with zero segments, which downstream parsers accept.

The built-in model is a deterministic stand-in: it derives a stable word
sequence from a digest of the chunk's samples, so identical audio always
produces identical documents and the full contract can be exercised without
model weights.  Real deployments register a loader under their own model
identifier.
"""

from __future__ import annotations

import base64
import binascii
import hashlib
import io
import random
import wave
from pathlib import Path
from typing import Protocol

import numpy as np
import uvicorn
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .config import AdapterConfig, AdapterConfigError
from .service import BadRequestError, error_response, json_object_body, optional_int

DEFAULT_MODEL_ID = "lexicon-v1"

FRAME_S = 0.02
VOICED_RMS_THRESHOLD = 0.01
MAX_GAP_FRAMES = 2  # voiced runs separated by <= this many silent frames merge
MIN_CHUNK_FRAMES = 2  # shorter runs are clicks, not speech


class AsrModel(Protocol):
    def transcribe_chunk(
        self, samples: np.ndarray, sample_rate_hz: int, n_best: int
    ) -> list[tuple[str, float]]:
        """Return up to n_best (text, score) candidates, best first."""
        ...


_LEXICON = (
    "alarm", "call", "cancel", "checkout", "demo", "down", "lamp", "light",
    "music", "next", "note", "off", "on", "open", "pause", "pet", "play",
    "read", "stop", "time", "turn", "up", "volume", "weather", "window",
)


class LexiconAsrModel:
    """Deterministic decoder stand-in.

    A digest of the chunk's samples seeds a generator that picks words from
    a fixed lexicon (roughly one word per 350 ms); lower-ranked candidates
    are single-word mutations of the previous one with strictly decreasing
    scores.
    """

    def transcribe_chunk(
        self, samples: np.ndarray, sample_rate_hz: int, n_best: int
    ) -> list[tuple[str, float]]:
        digest = hashlib.blake2b(samples.tobytes(), digest_size=16).digest()
        rng = random.Random(int.from_bytes(digest, "big"))
        duration_s = samples.size / sample_rate_hz
        n_words = max(1, round(duration_s / 0.35))
        words = [rng.choice(_LEXICON) for _ in range(n_words)]
        score = -0.1 * rng.random()
        pairs = []
        for _ in range(n_best):
            pairs.append((" ".join(words), round(score, 6)))
            words = list(words)
            words[rng.randrange(n_words)] = rng.choice(_LEXICON)
            score -= 0.05 + 0.2 * rng.random()
        return pairs


def load_asr_model(config: AdapterConfig) -> AsrModel:
    if config.model_id == DEFAULT_MODEL_ID:
        return LexiconAsrModel()
    raise AdapterConfigError(
        f"unknown ASR model {config.model_id!r}; available: {DEFAULT_MODEL_ID}"
    )


def detect_voiced_chunks(samples: np.ndarray, sample_rate_hz: int) -> list[tuple[int, int]]:
    """Find voiced spans as (start_sample, end_sample) pairs.

    A frame is voiced when its RMS clears an absolute floor, so all-zero
    or near-silent audio produces no chunks at all.
    """
    frame_len = max(1, int(round(FRAME_S * sample_rate_hz)))
    voiced = []
    for f in range(-(-samples.size // frame_len)):
        frame = samples[f * frame_len:(f + 1) * frame_len]
        if frame.size and np.sqrt(np.mean(np.square(frame))) > VOICED_RMS_THRESHOLD:
            voiced.append(f)

    runs: list[list[int]] = []
    for f in voiced:
        if runs and f - runs[-1][1] - 1 <= MAX_GAP_FRAMES:
            runs[-1][1] = f
        else:
            runs.append([f, f])
    return [
        (first * frame_len, min((last + 1) * frame_len, samples.size))
        for first, last in runs
        if last - first + 1 >= MIN_CHUNK_FRAMES
    ]


def _decode_wav_bytes(data: bytes) -> tuple[np.ndarray, int]:
    try:
        with wave.open(io.BytesIO(data), "rb") as wav:
            if wav.getnchannels() != 1:
                raise BadRequestError(
                    f"only mono audio is supported, got {wav.getnchannels()} channels"
                )
            if wav.getsampwidth() != 2:
                raise BadRequestError(
                    f"only 16-bit PCM is supported, got {8 * wav.getsampwidth()}-bit"
                )
            rate = wav.getframerate()
            frames = wav.readframes(wav.getnframes())
    except (wave.Error, EOFError) as exc:
        # wave raises bare EOFError on truncated or empty payloads
        raise BadRequestError(f"not a readable WAV file: {exc}") from None
    return np.frombuffer(frames, dtype="<i2").astype(np.float64) / 32768.0, rate


def _audio_from_request(body: dict) -> tuple[str, np.ndarray, int]:
    has_path = body.get("audio_path") is not None
    has_b64 = body.get("audio_b64") is not None
    if has_path == has_b64:
        raise BadRequestError("provide exactly one of 'audio_path' or 'audio_b64'")
    if has_path:
        path = body["audio_path"]
        if not isinstance(path, str):
            raise BadRequestError("'audio_path' must be a string")
        try:
            data = Path(path).read_bytes()
        except OSError as exc:
            raise BadRequestError(f"cannot read audio_path: {exc}") from None
        utterance_id = Path(path).stem
    else:
        raw = body["audio_b64"]
        if not isinstance(raw, str):
            raise BadRequestError("'audio_b64' must be a string")
        try:
            data = base64.b64decode(raw, validate=True)
        except (binascii.Error, ValueError) as exc:
            raise BadRequestError(f"invalid base64 audio: {exc}") from None
        utterance_id = "b64-" + hashlib.blake2b(data, digest_size=8).hexdigest()
    samples, rate = _decode_wav_bytes(data)
    return utterance_id, samples, rate


def transcribe_to_document(
    utterance_id: str,
    samples: np.ndarray,
    sample_rate_hz: int,
    n_best: int,
    model: AsrModel,
) -> dict:
    """Run VAD + per-chunk decoding and assemble one wire document."""
    segments = []
    for start, end in detect_voiced_chunks(samples, sample_rate_hz):
        pairs = model.transcribe_chunk(samples[start:end], sample_rate_hz, n_best)
        pairs = sorted(pairs[:n_best], key=lambda p: -p[1])
        segments.append(
            {
                "start_s": round(start / sample_rate_hz, 3),
                "end_s": round(end / sample_rate_hz, 3),
                "hypotheses": [
                    {"rank": i + 1, "text": text, "score": score}
                    for i, (text, score) in enumerate(pairs)
                ],
            }
        )
    return {"utterance_id": utterance_id, "segments": segments}


def create_asr_app(config: AdapterConfig, model: AsrModel | None = None) -> FastAPI:
    """Build the service; loading the configured model fails fast here."""
    model = model if model is not None else load_asr_model(config)
    app = FastAPI(title="gerkit-adapters asr")

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "model": config.model_id}

    @app.post("/transcribe")
    async def transcribe(request: Request):
        try:
            body = await json_object_body(request)
            utterance_id, samples, rate = _audio_from_request(body)
            n_best = min(optional_int(body, "n_best", config.beam_width), config.beam_width)
        except BadRequestError as exc:
            return error_response(400, str(exc))
        try:
            document = transcribe_to_document(utterance_id, samples, rate, n_best, model)
        except Exception as exc:
            return error_response(500, f"model failure: {exc}")
        return JSONResponse(document)

    return app


def serve_asr(config: AdapterConfig, host: str = "127.0.0.1"):
    """Run the transcription service until interrupted."""
    uvicorn.run(create_asr_app(config), host=host, port=config.port)
