"""Core signal/mask containers and the SDR metric family."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

#: Run kinds used by :class:`SampleMask` and :class:`SegmentList`.
KINDS = ("reliable", "high", "low")


@dataclass
class Signal:
    """Mono sample sequence with its sample rate.

    Amplitudes are dimensionless reals, nominally in [-1, 1]. 16-bit PCM
    input is converted to this range on ingest (see :mod:`declip.wavio`).
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("expected a 1-D mono sample array")
        if self.samples.size < 1:
            raise ValueError("signal must contain at least one sample")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("signal contains non-finite samples")
        self.sample_rate = int(self.sample_rate)
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")

    def __len__(self) -> int:
        return self.samples.size


@dataclass
class SampleMask:
    """Per-sample partition into reliable / clipped-high / clipped-low.

    The three boolean arrays must be disjoint and exhaustive: every index
    carries exactly one label.
    """

    reliable: np.ndarray
    high: np.ndarray
    low: np.ndarray

    def __post_init__(self):
        self.reliable = np.asarray(self.reliable, dtype=bool)
        self.high = np.asarray(self.high, dtype=bool)
        self.low = np.asarray(self.low, dtype=bool)
        n = self.reliable.size
        if self.high.size != n or self.low.size != n:
            raise ValueError("mask arrays must have equal length")
        if n < 1:
            raise ValueError("mask must cover at least one sample")
        labels = (
            self.reliable.astype(np.int8)
            + self.high.astype(np.int8)
            + self.low.astype(np.int8)
        )
        if np.any(labels != 1):
            raise ValueError("mask labels must partition the sample index set")

    def __len__(self) -> int:
        return self.reliable.size

    @property
    def clipped(self) -> np.ndarray:
        """Boolean selector of all clipped samples (high or low)."""
        return self.high | self.low


class Segment(NamedTuple):
    start: int
    end: int  # inclusive
    kind: str


@dataclass
class SegmentList:
    """Maximal same-kind runs covering [0, N-1] in index order."""

    runs: list[Segment]

    def __post_init__(self):
        if not self.runs:
            raise ValueError("segment list must contain at least one run")
        pos = 0
        prev_kind = None
        for seg in self.runs:
            if seg.kind not in KINDS:
                raise ValueError(f"unknown segment kind {seg.kind!r}")
            if seg.start != pos or seg.end < seg.start:
                raise ValueError("runs must be contiguous and non-empty")
            if seg.kind == prev_kind:
                raise ValueError("adjacent runs must differ in kind")
            pos = seg.end + 1
            prev_kind = seg.kind

    def __len__(self) -> int:
        return len(self.runs)

    @property
    def n_samples(self) -> int:
        return self.runs[-1].end + 1

    def to_mask(self) -> SampleMask:
        """Re-expand the runs into a SampleMask (exact round-trip)."""
        n = self.n_samples
        arrays = {kind: np.zeros(n, dtype=bool) for kind in KINDS}
        for seg in self.runs:
            arrays[seg.kind][seg.start : seg.end + 1] = True
        return SampleMask(arrays["reliable"], arrays["high"], arrays["low"])


def segments(mask: SampleMask) -> SegmentList:
    """Decompose a mask into maximal same-kind runs in index order."""
    codes = np.where(mask.reliable, 0, np.where(mask.high, 1, 2))
    boundaries = np.flatnonzero(np.diff(codes)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries - 1, [codes.size - 1]))
    runs = [
        Segment(int(s), int(e), KINDS[codes[s]]) for s, e in zip(starts, ends)
    ]
    return SegmentList(runs)


def _sdr_arrays(u: np.ndarray, v: np.ndarray) -> float:
    ref = float(np.linalg.norm(u))
    if ref == 0.0:
        raise ValueError("SDR reference signal is identically zero")
    residual = float(np.linalg.norm(u - v))
    if residual == 0.0:
        return float("inf")
    return float(20.0 * np.log10(ref / residual))


def sdr(u: Signal, v: Signal) -> float:
    """Signal-to-distortion ratio 20*log10(||u|| / ||u - v||) in dB.

    Returns +inf when the signals match exactly, so that downstream tables
    can report a perfect reconstruction instead of crashing.
    """
    if len(u) != len(v):
        raise ValueError("SDR operands must have equal length")
    if u.sample_rate != v.sample_rate:
        raise ValueError("SDR operands must share a sample rate")
    return _sdr_arrays(u.samples, v.samples)


def sdr_on_mask(u: Signal, v: Signal, selector: np.ndarray) -> float:
    """SDR restricted to the samples picked out by a boolean selector."""
    if len(u) != len(v):
        raise ValueError("SDR operands must have equal length")
    if u.sample_rate != v.sample_rate:
        raise ValueError("SDR operands must share a sample rate")
    selector = np.asarray(selector, dtype=bool)
    if selector.size != len(u):
        raise ValueError("selector length must match the signals")
    if not selector.any():
        raise ValueError("selector picks no samples")
    return _sdr_arrays(u.samples[selector], v.samples[selector])
