"""Tight short-time Fourier frame: analysis/synthesis with exact reconstruction.

The grid of windowed spectra is normalized so that the frame bound is 1:
synthesis is the adjoint of analysis and synthesis(analysis(x)) returns x
up to floating-point rounding, including the signal edges. Edge handling
embeds the signal, padded by half a window of zeros on each side, into a
circular domain whose length is a whole number of hops; the zero gap is at
least one window long, so no frame ever sees both ends of the signal.
"""

import math
from dataclasses import dataclass

import numpy as np

from .signals import Signal

_WINDOW_NAMES = ("hann", "sine", "hamming", "rect")


def _periodic_window(name: str, length: int) -> np.ndarray:
    n = np.arange(length)
    if name == "hann":
        return 0.5 - 0.5 * np.cos(2.0 * np.pi * n / length)
    if name == "sine":
        return np.sin(np.pi * n / length)
    if name == "hamming":
        return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / length)
    if name == "rect":
        return np.ones(length)
    raise ValueError(f"unknown window {name!r}; expected one of {_WINDOW_NAMES}")


@dataclass
class FrameParams:
    """Geometry of the time-frequency grid.

    The hop must divide the window length, the overlap must be at least
    50% (window_length >= 2*hop), and the FFT length must be an even
    number at least as long as the window.
    """

    window_length: int = 8192
    hop: int = 2048
    fft_length: int = 8192
    window: str = "hann"

    def __post_init__(self):
        if self.hop < 1 or self.window_length < 2:
            raise ValueError("window and hop must be positive")
        if self.window_length % self.hop != 0:
            raise ValueError("hop must divide the window length")
        if self.window_length < 2 * self.hop:
            raise ValueError("overlap must be at least 50% (window >= 2*hop)")
        if self.fft_length < self.window_length:
            raise ValueError("fft_length must be at least the window length")
        if self.fft_length % 2 != 0:
            raise ValueError("fft_length must be even")
        if self.window not in _WINDOW_NAMES:
            raise ValueError(
                f"unknown window {self.window!r}; expected one of {_WINDOW_NAMES}"
            )

    @property
    def bins(self) -> int:
        """One-sided spectrum size F = fft_length/2 + 1."""
        return self.fft_length // 2 + 1


def default_frame_params(sample_rate: int) -> FrameParams:
    """8192/2048/8192 Hann at 44.1 kHz, scaled in powers of two for lower rates."""
    if sample_rate <= 0:
        raise ValueError("sample rate must be positive")
    window = 8192
    if sample_rate < 40000:
        window = 2 ** max(4, round(math.log2(8192 * sample_rate / 44100)))
    return FrameParams(window_length=window, hop=window // 4, fft_length=window)


@dataclass
class TFCoeffs:
    """Complex coefficient grid (bins x frames) plus the geometry to invert it."""

    grid: np.ndarray
    params: FrameParams
    signal_length: int
    sample_rate: int

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.complex128)
        if self.grid.ndim != 2:
            raise ValueError("coefficient grid must be 2-D (bins x frames)")
        if self.grid.shape[0] != self.params.bins:
            raise ValueError(
                f"grid has {self.grid.shape[0]} bins, expected {self.params.bins}"
            )
        if self.signal_length < 1:
            raise ValueError("signal length must be positive")

    @property
    def n_bins(self) -> int:
        return self.grid.shape[0]

    @property
    def n_frames(self) -> int:
        return self.grid.shape[1]


class FramePlan:
    """Precomputed transform geometry for one (params, signal_length) pair.

    ``forward``/``backward`` operate on raw sample/grid arrays; iterative
    solvers reuse one plan to avoid recomputing windows every call.
    """

    def __init__(self, params: FrameParams, signal_length: int):
        if signal_length < params.window_length:
            raise ValueError(
                f"signal of length {signal_length} is shorter than one "
                f"window ({params.window_length} samples)"
            )
        self.params = params
        self.signal_length = signal_length
        length, hop, nfft = params.window_length, params.hop, params.fft_length
        self.pad = length // 2
        self.n_frames = -(-(signal_length + 2 * self.pad) // hop)
        self.padded = self.n_frames * hop

        base = _periodic_window(params.window, length)
        hop_sums = np.sum((base * base).reshape(length // hop, hop), axis=0)
        if np.min(hop_sums) <= 0.0:
            raise ValueError("window/hop pair leaves samples with no coverage")
        # frame-bound-1 normalization: nfft * sum_t w~^2(m - t*hop) == 1
        tight = base / np.sqrt(nfft * np.tile(hop_sums, length // hop))
        self.window_analysis = tight
        self.window_synthesis = nfft * tight

        bins = params.bins
        # sqrt(2) on interior bins makes the one-sided grid norm equal the
        # two-sided spectrum norm; the adjoint halves them back.
        self.scale_forward = np.ones(bins)
        self.scale_forward[1:-1] = np.sqrt(2.0)
        self.scale_adjoint = np.ones(bins)
        self.scale_adjoint[1:-1] = np.sqrt(2.0) / 2.0

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Windowed one-sided spectra of the embedded signal, (bins x frames)."""
        length, hop = self.params.window_length, self.params.hop
        buf = np.zeros(self.padded + length - hop)
        buf[self.pad : self.pad + self.signal_length] = x
        if length > hop:  # frames that wrap past the circular end read the start
            buf[self.padded :] = buf[: length - hop]
        frames = np.lib.stride_tricks.sliding_window_view(buf, length)[::hop]
        spectra = np.fft.rfft(frames * self.window_analysis, n=self.params.fft_length, axis=1)
        return (spectra * self.scale_forward).T

    def backward(self, grid: np.ndarray) -> np.ndarray:
        """Adjoint of ``forward``: weighted overlap-add back to signal samples."""
        length, hop = self.params.window_length, self.params.hop
        spectra = grid.T * self.scale_adjoint
        # the adjoint of a real-output FFT drops the imaginary endpoint parts
        spectra[:, 0] = spectra[:, 0].real
        spectra[:, -1] = spectra[:, -1].real
        frames = np.fft.irfft(spectra, n=self.params.fft_length, axis=1)
        frames = frames[:, :length] * self.window_synthesis
        buf = np.zeros(self.padded + length - hop)
        for t in range(self.n_frames):
            start = t * hop
            buf[start : start + length] += frames[t]
        if length > hop:
            buf[: length - hop] += buf[self.padded :]
        return buf[self.pad : self.pad + self.signal_length].copy()


def analysis(x: Signal, params: FrameParams | None = None) -> TFCoeffs:
    """Short-time spectra of a signal on a tight frame with bound 1."""
    if params is None:
        params = default_frame_params(x.sample_rate)
    plan = FramePlan(params, len(x))
    return TFCoeffs(plan.forward(x.samples), params, len(x), x.sample_rate)


def synthesis(z: TFCoeffs) -> Signal:
    """Overlap-add reconstruction; the adjoint of :func:`analysis`."""
    plan = FramePlan(z.params, z.signal_length)
    if z.n_frames != plan.n_frames:
        raise ValueError(
            f"grid has {z.n_frames} frames but signal length "
            f"{z.signal_length} requires {plan.n_frames}"
        )
    return Signal(plan.backward(z.grid), z.sample_rate)
