"""Seeded augmentation planning and a PCM executor.

Planning draws per-utterance decisions from a generator keyed by
``(seed, utterance_id)``, so plans replay identically:

* pure noise with probability 0.01 - the item becomes noise only and its
  target transcription becomes empty (anti-hallucination training signal);
  exclusive with everything else;
* otherwise edge noise with probability 0.5 - a noise clip is prepended or
  appended at a drawn SNR, transcription unchanged;
* independently, with probability 0.25, either time stretch (uniform
  factor in [0.85, 1.15]) or a spectrogram-masking entry.

Spectrogram masking is only planned here (parameters serialized for the
external trainer); the executor applies edge noise and time stretch to
16-bit PCM WAV audio.
"""

from __future__ import annotations

import hashlib
import json
import random
import wave
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Protocol

import numpy as np

from .errors import GerkitError

PURE_NOISE_PROB = 0.01
EDGE_NOISE_PROB = 0.5
TEMPO_PROB = 0.25
STRETCH_RANGE = (0.85, 1.15)


class EmptyNoisePoolError(GerkitError):
    pass


class SampleRateMismatchError(GerkitError):
    pass


class InvalidFactorError(GerkitError):
    pass


class NoiseNotFoundError(GerkitError):
    pass


class UnsupportedAudioError(GerkitError):
    pass


@dataclass(frozen=True)
class PcmBuffer:
    """Mono float PCM in [-1, 1]."""

    samples: np.ndarray
    sample_rate_hz: int

    channels = 1

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise UnsupportedAudioError(f"sample rate must be positive, got {self.sample_rate_hz}")
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise UnsupportedAudioError("only mono (1-D) sample arrays are supported")
        if samples.size and not np.all(np.isfinite(samples)):
            raise UnsupportedAudioError("samples must be finite")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass(frozen=True)
class EdgeNoise:
    position: str  # "begin" or "end"
    noise_id: str
    duration_s: float
    snr_db: float


@dataclass(frozen=True)
class SpecAugmentMasks:
    freq_masks: int
    freq_width: int
    time_masks: int
    time_width: int


@dataclass(frozen=True)
class Tempo:
    kind: str  # "stretch" or "spec_augment"
    factor: float | None = None
    masks: SpecAugmentMasks | None = None


@dataclass(frozen=True)
class AugmentationPlan:
    utterance_id: str
    seed: int
    edge_noise: EdgeNoise | None
    pure_noise: bool
    tempo: Tempo | None

    def __post_init__(self):
        if self.pure_noise and (self.edge_noise is not None or self.tempo is not None):
            raise ValueError("a pure-noise plan must not carry edge_noise or tempo")
        if self.tempo is not None and self.tempo.kind == "stretch":
            lo, hi = STRETCH_RANGE
            if not lo <= self.tempo.factor <= hi:
                raise ValueError(f"stretch factor {self.tempo.factor} outside [{lo}, {hi}]")


@dataclass(frozen=True)
class AugmentConfig:
    """Pool and ranges the planner draws from."""

    noise_pool: tuple[str, ...]
    duration_range_s: tuple[float, float] = (0.5, 2.0)
    snr_range_db: tuple[float, float] = (5.0, 20.0)
    masks: SpecAugmentMasks = SpecAugmentMasks(
        freq_masks=2, freq_width=27, time_masks=2, time_width=100
    )


class TargetTransform(Enum):
    KEEP = "keep"
    MAKE_EMPTY = "make_empty"


class NoiseLoader(Protocol):
    def ids(self) -> list[str]: ...

    def load(self, noise_id: str) -> PcmBuffer: ...


def _keyed_rng(seed: int, utterance_id: str, label: str = "") -> random.Random:
    digest = hashlib.blake2b(
        f"{seed}\x1f{utterance_id}\x1f{label}".encode("utf-8"), digest_size=8
    ).digest()
    return random.Random(int.from_bytes(digest, "big"))


def plan_augmentation(seed: int, utterance_id: str, config: AugmentConfig) -> AugmentationPlan:
    """Draw one reproducible augmentation plan.

    The draw order is fixed; identical ``(seed, utterance_id, config)``
    always yields an identical plan.
    """
    rng = _keyed_rng(seed, utterance_id)

    if rng.random() < PURE_NOISE_PROB:
        if not config.noise_pool:
            raise EmptyNoisePoolError("pure noise drawn but the noise pool is empty")
        return AugmentationPlan(
            utterance_id=utterance_id, seed=seed, edge_noise=None, pure_noise=True, tempo=None
        )

    edge_noise = None
    if rng.random() < EDGE_NOISE_PROB:
        if not config.noise_pool:
            raise EmptyNoisePoolError("edge noise drawn but the noise pool is empty")
        position = "begin" if rng.random() < 0.5 else "end"
        noise_id = config.noise_pool[rng.randrange(len(config.noise_pool))]
        duration_s = rng.uniform(*config.duration_range_s)
        snr_db = rng.uniform(*config.snr_range_db)
        edge_noise = EdgeNoise(
            position=position, noise_id=noise_id, duration_s=duration_s, snr_db=snr_db
        )

    tempo = None
    if rng.random() < TEMPO_PROB:
        if rng.random() < 0.5:
            tempo = Tempo(kind="stretch", factor=rng.uniform(*STRETCH_RANGE))
        else:
            tempo = Tempo(kind="spec_augment", masks=config.masks)

    return AugmentationPlan(
        utterance_id=utterance_id, seed=seed, edge_noise=edge_noise, pure_noise=False, tempo=tempo
    )


def plan_to_dict(plan: AugmentationPlan) -> dict:
    tempo = None
    if plan.tempo is not None:
        tempo = {"kind": plan.tempo.kind}
        if plan.tempo.kind == "stretch":
            tempo["factor"] = plan.tempo.factor
        else:
            m = plan.tempo.masks
            tempo["masks"] = {
                "freq_masks": m.freq_masks,
                "freq_width": m.freq_width,
                "time_masks": m.time_masks,
                "time_width": m.time_width,
            }
    edge = None
    if plan.edge_noise is not None:
        edge = {
            "position": plan.edge_noise.position,
            "noise_id": plan.edge_noise.noise_id,
            "duration_s": plan.edge_noise.duration_s,
            "snr_db": plan.edge_noise.snr_db,
        }
    return {
        "utterance_id": plan.utterance_id,
        "seed": plan.seed,
        "edge_noise": edge,
        "pure_noise": plan.pure_noise,
        "tempo": tempo,
    }


def plan_from_dict(obj: dict) -> AugmentationPlan:
    edge = None
    if obj.get("edge_noise") is not None:
        e = obj["edge_noise"]
        edge = EdgeNoise(
            position=e["position"],
            noise_id=e["noise_id"],
            duration_s=e["duration_s"],
            snr_db=e["snr_db"],
        )
    tempo = None
    if obj.get("tempo") is not None:
        t = obj["tempo"]
        masks = None
        if t.get("masks") is not None:
            m = t["masks"]
            masks = SpecAugmentMasks(
                freq_masks=m["freq_masks"],
                freq_width=m["freq_width"],
                time_masks=m["time_masks"],
                time_width=m["time_width"],
            )
        tempo = Tempo(kind=t["kind"], factor=t.get("factor"), masks=masks)
    return AugmentationPlan(
        utterance_id=obj["utterance_id"],
        seed=obj["seed"],
        edge_noise=edge,
        pure_noise=obj["pure_noise"],
        tempo=tempo,
    )


def write_plans(plans: list[AugmentationPlan]) -> bytes:
    """Serialize plans as JSON Lines, one plan per line."""
    lines = [json.dumps(plan_to_dict(p), ensure_ascii=False) for p in plans]
    return ("\n".join(lines) + "\n" if lines else "").encode("utf-8")


def read_plans(data: bytes | str) -> list[AugmentationPlan]:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return [plan_from_dict(json.loads(line)) for line in data.splitlines() if line.strip()]


def _rms(samples: np.ndarray) -> float:
    if samples.size == 0:
        return 0.0
    return float(np.sqrt(np.mean(np.square(samples))))


def _tiled(samples: np.ndarray, length: int) -> np.ndarray:
    if length == 0:
        return samples[:0]
    if samples.size == 0:
        return np.zeros(length)
    reps = -(-length // samples.size)
    return np.tile(samples, reps)[:length]


def mix_noise_at_edge(
    speech: PcmBuffer,
    noise: PcmBuffer,
    position: str,
    duration_s: float,
    snr_db: float,
    silent_speech_noise_rms: float = 0.05,
) -> PcmBuffer:
    """Prepend or append a noise clip scaled to the requested SNR.

    The noise is looped when shorter than ``duration_s``; the speech
    samples themselves are untouched, so the transcription stays valid.
    When the speech has zero RMS the noise is scaled to
    ``silent_speech_noise_rms`` instead of an SNR-relative level.
    """
    if speech.sample_rate_hz != noise.sample_rate_hz:
        raise SampleRateMismatchError(
            f"speech at {speech.sample_rate_hz} Hz, noise at {noise.sample_rate_hz} Hz"
        )
    if position not in ("begin", "end"):
        raise ValueError(f"position must be 'begin' or 'end', got {position!r}")
    n_noise = int(round(duration_s * speech.sample_rate_hz))
    if n_noise <= 0:
        return PcmBuffer(speech.samples.copy(), speech.sample_rate_hz)

    segment = _tiled(noise.samples, n_noise).astype(np.float64)
    speech_rms = _rms(speech.samples)
    target_rms = (
        speech_rms / (10.0 ** (snr_db / 20.0)) if speech_rms > 0.0 else silent_speech_noise_rms
    )
    segment_rms = _rms(segment)
    if segment_rms > 0.0:
        segment = segment * (target_rms / segment_rms)
    segment = np.clip(segment, -1.0, 1.0)

    if position == "begin":
        samples = np.concatenate([segment, speech.samples])
    else:
        samples = np.concatenate([speech.samples, segment])
    return PcmBuffer(samples, speech.sample_rate_hz)


def time_stretch(speech: PcmBuffer, factor: float) -> PcmBuffer:
    """Resample by linear interpolation; output length = round(len / factor).

    Factor 1.0 returns bit-identical samples.  Naive resampling shifts
    pitch along with tempo.
    """
    if not 0.5 <= factor <= 2.0:
        raise InvalidFactorError(f"stretch factor must be in [0.5, 2.0], got {factor}")
    samples = speech.samples
    if factor == 1.0 or samples.size == 0:
        return PcmBuffer(samples.copy(), speech.sample_rate_hz)
    out_len = int(round(samples.size / factor))
    if out_len == 0:
        return PcmBuffer(samples[:0], speech.sample_rate_hz)
    positions = np.minimum(np.arange(out_len) * factor, samples.size - 1)
    stretched = np.interp(positions, np.arange(samples.size), samples)
    return PcmBuffer(stretched, speech.sample_rate_hz)


def apply_plan(
    speech: PcmBuffer, plan: AugmentationPlan, noise_loader: NoiseLoader
) -> tuple[PcmBuffer, TargetTransform]:
    """Execute a plan on one utterance's audio.

    Pure-noise plans replace the audio with a noise clip of equal duration
    (the noise is chosen deterministically from the loader's pool, keyed by
    the plan's seed and utterance id) and make the target empty.  Otherwise
    edge noise is applied first, then time stretch; spectrogram-masking
    entries pass through untouched for the external trainer.
    """
    if plan.pure_noise:
        pool = sorted(noise_loader.ids())
        if not pool:
            raise EmptyNoisePoolError("pure-noise plan but the noise loader has no entries")
        rng = _keyed_rng(plan.seed, plan.utterance_id, label="pure_noise")
        noise = noise_loader.load(pool[rng.randrange(len(pool))])
        if noise.sample_rate_hz != speech.sample_rate_hz:
            raise SampleRateMismatchError(
                f"speech at {speech.sample_rate_hz} Hz, noise at {noise.sample_rate_hz} Hz"
            )
        samples = np.clip(_tiled(noise.samples, speech.samples.size), -1.0, 1.0)
        return PcmBuffer(samples, speech.sample_rate_hz), TargetTransform.MAKE_EMPTY

    out = speech
    if plan.edge_noise is not None:
        try:
            noise = noise_loader.load(plan.edge_noise.noise_id)
        except KeyError as exc:
            raise NoiseNotFoundError(f"noise {plan.edge_noise.noise_id!r} not found") from exc
        out = mix_noise_at_edge(
            out,
            noise,
            position=plan.edge_noise.position,
            duration_s=plan.edge_noise.duration_s,
            snr_db=plan.edge_noise.snr_db,
        )
    if plan.tempo is not None and plan.tempo.kind == "stretch":
        out = time_stretch(out, plan.tempo.factor)
    return out, TargetTransform.KEEP


class DirectoryNoiseLoader:
    """Read-only noise pool backed by a directory of WAV files.

    Ids are file stems; loads are stateless, so concurrent reads are safe.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self._paths = {p.stem: p for p in sorted(self.directory.glob("*.wav"))}

    def ids(self) -> list[str]:
        return sorted(self._paths)

    def load(self, noise_id: str) -> PcmBuffer:
        if noise_id not in self._paths:
            raise NoiseNotFoundError(f"noise {noise_id!r} not found in {self.directory}")
        return read_wav(self._paths[noise_id])


def read_wav(path: str | Path) -> PcmBuffer:
    """Read a mono 16-bit PCM WAV file."""
    with wave.open(str(path), "rb") as wav:
        if wav.getnchannels() != 1:
            raise UnsupportedAudioError(
                f"{path}: only mono audio is supported, got {wav.getnchannels()} channels"
            )
        if wav.getsampwidth() != 2:
            raise UnsupportedAudioError(
                f"{path}: only 16-bit PCM is supported, got {8 * wav.getsampwidth()}-bit"
            )
        rate = wav.getframerate()
        frames = wav.readframes(wav.getnframes())
    samples = np.frombuffer(frames, dtype="<i2").astype(np.float64) / 32768.0
    return PcmBuffer(samples, rate)


def write_wav(path: str | Path, buffer: PcmBuffer):
    """Write a mono 16-bit PCM WAV file."""
    clipped = np.clip(buffer.samples, -1.0, 1.0)
    ints = np.round(clipped * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(buffer.sample_rate_hz)
        wav.writeframes(ints.tobytes())
