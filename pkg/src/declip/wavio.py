"""16-bit PCM mono WAV input/output and deterministic test-signal synthesis."""

import wave
from pathlib import Path

import numpy as np

from .signals import Signal

_SCALE = 32768.0
_GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0
#: incommensurate partials for the multisine generator (golden-ratio ladder)
MULTISINE_FREQS = tuple(220.0 * _GOLDEN**k for k in range(5))
#: RMS of the multisine's pink residual relative to unit-amplitude partials
MULTISINE_FLOOR = 0.004
SYNTH_KINDS = ("sine", "multisine", "sweep", "noise_burst")


def _pink_noise(rng: np.random.Generator, n: int, rate: int) -> np.ndarray:
    """Unit-RMS noise with 1/f power above 40 Hz."""
    spectrum = np.fft.rfft(rng.standard_normal(n))
    freqs = np.fft.rfftfreq(n, 1.0 / rate)
    spectrum /= np.sqrt(np.maximum(freqs, 40.0))
    v = np.fft.irfft(spectrum, n=n)
    return v / np.sqrt(np.mean(v * v))


def read_wav(path) -> Signal:
    """Read a 16-bit PCM mono RIFF/WAVE file, scaled to [-1, 1)."""
    try:
        with wave.open(str(path), "rb") as wf:
            if wf.getcomptype() != "NONE":
                raise ValueError(f"{path}: compressed WAV is not supported")
            if wf.getnchannels() != 1:
                raise ValueError(f"{path}: expected mono, got {wf.getnchannels()} channels")
            if wf.getsampwidth() != 2:
                raise ValueError(f"{path}: expected 16-bit PCM, got {8 * wf.getsampwidth()}-bit")
            rate = wf.getframerate()
            raw = wf.readframes(wf.getnframes())
    except wave.Error as exc:
        raise ValueError(f"{path}: not a readable RIFF/WAVE file ({exc})") from exc
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / _SCALE
    return Signal(samples, rate)


def write_wav(signal: Signal, path) -> int:
    """Write 16-bit PCM mono; returns how many samples fell outside [-1, 1].

    Out-of-range samples are hard-clipped to the representable range and
    counted (never wrapped); callers report the count. Output bytes are a
    deterministic function of the input.
    """
    v = signal.samples
    clipped_count = int(np.count_nonzero((v < -1.0) | (v > 1.0)))
    ints = np.clip(np.round(v * _SCALE), -32768, 32767).astype("<i2")
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(signal.sample_rate)
        wf.writeframes(ints.tobytes())
    return clipped_count


def synth_signal(kind: str, duration: float, rate: int = 44100, seed: int = 0) -> Signal:
    """Deterministic synthetic test signal, peak-normalized to 0.99.

    ``multisine`` sums five sinusoids at fixed incommensurate frequencies
    with seed-dependent phases over a weak pink residual, so that like
    real audio it is dominated by tones but not exactly sparse; ``sine``
    is a plain 440 Hz tone; ``sweep`` is a linear chirp; ``noise_burst``
    is enveloped white noise.
    """
    if duration <= 0.0:
        raise ValueError("duration must be positive")
    if rate <= 0:
        raise ValueError("sample rate must be positive")
    n = int(round(duration * rate))
    if n < 1:
        raise ValueError("duration too short for one sample")
    t = np.arange(n) / rate
    rng = np.random.default_rng(seed)
    if kind == "sine":
        v = np.sin(2.0 * np.pi * 440.0 * t)
    elif kind == "multisine":
        phases = rng.uniform(0.0, 2.0 * np.pi, size=len(MULTISINE_FREQS))
        v = np.zeros(n)
        for freq, phase in zip(MULTISINE_FREQS, phases):
            v += np.sin(2.0 * np.pi * freq * t + phase)
        v += MULTISINE_FLOOR * _pink_noise(rng, n, rate)
    elif kind == "sweep":
        f0, f1 = 100.0, min(0.4 * rate, 8000.0)
        v = np.sin(2.0 * np.pi * (f0 * t + 0.5 * (f1 - f0) * t * t / duration))
    elif kind == "noise_burst":
        envelope = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)
        v = rng.standard_normal(n) * envelope
    else:
        raise ValueError(f"unknown signal kind {kind!r}; expected one of {SYNTH_KINDS}")
    peak = float(np.max(np.abs(v)))
    if peak > 0.0:
        v *= 0.99 / peak
    return Signal(v, rate)
