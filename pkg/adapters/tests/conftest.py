import io
import wave

import numpy as np
import pytest

SAMPLE_RATE = 16_000


def _wav_bytes(samples: np.ndarray, rate: int = SAMPLE_RATE) -> bytes:
    pcm = np.clip(samples, -1.0, 1.0)
    ints = (pcm * 32767.0).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as writer:
        writer.setnchannels(1)
        writer.setsampwidth(2)
        writer.setframerate(rate)
        writer.writeframes(ints.tobytes())
    return buf.getvalue()


@pytest.fixture
def wav_bytes():
    """Callable turning a float array in [-1, 1] into mono 16-bit WAV bytes."""
    return _wav_bytes


@pytest.fixture
def speech_samples() -> np.ndarray:
    """Two tone bursts separated by silence: voiced roughly at 0.3-0.7s and 1.0-1.5s."""

    def tone(duration_s: float, freq: float) -> np.ndarray:
        t = np.arange(int(duration_s * SAMPLE_RATE)) / SAMPLE_RATE
        return 0.3 * np.sin(2.0 * np.pi * freq * t)

    def silence(duration_s: float) -> np.ndarray:
        return np.zeros(int(duration_s * SAMPLE_RATE))

    return np.concatenate(
        [silence(0.3), tone(0.4, 240.0), silence(0.3), tone(0.5, 350.0), silence(0.2)]
    )


@pytest.fixture
def speech_wav(speech_samples) -> bytes:
    return _wav_bytes(speech_samples)


@pytest.fixture
def silence_wav() -> bytes:
    return _wav_bytes(np.zeros(SAMPLE_RATE))
