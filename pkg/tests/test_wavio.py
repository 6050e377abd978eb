import wave

import numpy as np
import pytest

from declip.frames import FrameParams, analysis
from declip.signals import Signal
from declip.wavio import MULTISINE_FREQS, read_wav, synth_signal, write_wav


class TestWavRoundTrip:
    def test_quantization_bound(self, tmp_path):
        rng = np.random.default_rng(0)
        x = Signal(rng.uniform(-0.999, 0.999, size=2000), 44100)
        path = tmp_path / "x.wav"
        write_wav(x, path)
        back = read_wav(path)
        assert back.sample_rate == 44100
        assert len(back) == len(x)
        assert np.max(np.abs(back.samples - x.samples)) <= 1.0 / 32768.0

    def test_silence(self, tmp_path):
        path = tmp_path / "zero.wav"
        write_wav(Signal(np.zeros(100), 8000), path)
        back = read_wav(path)
        assert not back.samples.any()
        with wave.open(str(path), "rb") as wf:
            assert wf.readframes(100) == b"\x00" * 200

    def test_full_scale_negative(self, tmp_path):
        path = tmp_path / "neg.wav"
        write_wav(Signal(np.array([-1.0]), 8000), path)
        with wave.open(str(path), "rb") as wf:
            assert wf.readframes(1) == b"\x00\x80"  # int16 -32768 little-endian
        assert read_wav(path).samples[0] == -1.0

    def test_near_full_scale_positive(self, tmp_path):
        path = tmp_path / "pos.wav"
        write_wav(Signal(np.array([1.0 - 1.0 / 32768.0]), 8000), path)
        with wave.open(str(path), "rb") as wf:
            frames = np.frombuffer(wf.readframes(1), dtype="<i2")
        assert frames[0] == 32767

    def test_deterministic_bytes(self, tmp_path):
        rng = np.random.default_rng(1)
        x = Signal(rng.uniform(-1, 1, size=500), 22050)
        a, b = tmp_path / "a.wav", tmp_path / "b.wav"
        write_wav(x, a)
        write_wav(x, b)
        assert a.read_bytes() == b.read_bytes()

    def test_out_of_range_counted_and_clamped(self, tmp_path):
        x = Signal(np.array([0.0, 1.5, -2.0, 0.5]), 8000)
        path = tmp_path / "hot.wav"
        clipped = write_wav(x, path)
        assert clipped == 2
        back = read_wav(path)
        assert back.samples[1] == pytest.approx(32767 / 32768)
        assert back.samples[2] == -1.0


class TestWavValidation:
    def test_rejects_stereo(self, tmp_path):
        path = tmp_path / "stereo.wav"
        with wave.open(str(path), "wb") as wf:
            wf.setnchannels(2)
            wf.setsampwidth(2)
            wf.setframerate(8000)
            wf.writeframes(b"\x00" * 8)
        with pytest.raises(ValueError, match="mono"):
            read_wav(path)

    def test_rejects_8bit(self, tmp_path):
        path = tmp_path / "8bit.wav"
        with wave.open(str(path), "wb") as wf:
            wf.setnchannels(1)
            wf.setsampwidth(1)
            wf.setframerate(8000)
            wf.writeframes(b"\x00" * 8)
        with pytest.raises(ValueError, match="16-bit"):
            read_wav(path)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "noise.bin"
        path.write_bytes(b"this is not a RIFF file at all")
        with pytest.raises(ValueError):
            read_wav(path)


class TestSynthSignal:
    def test_sine_length_and_peak(self):
        x = synth_signal("sine", 1.0, 44100)
        assert len(x) == 44100
        assert np.max(np.abs(x.samples)) == pytest.approx(0.99)

    @pytest.mark.parametrize("kind", ["sine", "multisine", "sweep", "noise_burst"])
    def test_deterministic_given_seed(self, kind):
        a = synth_signal(kind, 0.1, 22050, seed=42)
        b = synth_signal(kind, 0.1, 22050, seed=42)
        assert np.array_equal(a.samples, b.samples)

    def test_seed_changes_multisine(self):
        a = synth_signal("multisine", 0.1, 22050, seed=0)
        b = synth_signal("multisine", 0.1, 22050, seed=1)
        assert not np.array_equal(a.samples, b.samples)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            synth_signal("square", 1.0, 8000)

    def test_bad_duration(self):
        with pytest.raises(ValueError):
            synth_signal("sine", 0.0, 8000)

    def test_multisine_has_five_dominant_partials(self):
        x = synth_signal("multisine", 1.0, 44100, seed=3)
        params = FrameParams(window_length=8192, hop=2048, fft_length=8192)
        z = analysis(x, params)
        energy = np.sum(np.abs(z.grid) ** 2, axis=1)
        bin_hz = 44100 / 8192
        expected_bins = sorted(round(f / bin_hz) for f in MULTISINE_FREQS)
        # greedy peak picking with a guard band wider than window leakage
        residual = energy.copy()
        peaks = []
        for _ in range(6):
            b = int(np.argmax(residual))
            peaks.append((b, residual[b]))
            lo, hi = max(0, b - 8), min(len(residual), b + 9)
            residual[lo:hi] = 0.0
        top5 = sorted(b for b, _ in peaks[:5])
        assert all(abs(a - b) <= 2 for a, b in zip(top5, expected_bins))
        # the sixth peak is far below the weakest partial
        assert peaks[5][1] < 0.05 * min(v for _, v in peaks[:5])
