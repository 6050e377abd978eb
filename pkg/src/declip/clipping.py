"""Hard-clipping model: apply clipping, recover masks, search thresholds."""

from dataclasses import dataclass

import numpy as np

from .signals import SampleMask, Signal, _sdr_arrays


@dataclass
class ClipModel:
    """Symmetric hard-clipping thresholds -theta, +theta."""

    theta: float

    def __post_init__(self):
        self.theta = float(self.theta)
        if not np.isfinite(self.theta) or self.theta <= 0.0:
            raise ValueError("clipping threshold must be positive and finite")

    def apply(self, x: Signal) -> Signal:
        return hard_clip(x, self.theta)


def hard_clip(x: Signal, theta: float) -> Signal:
    """Saturate every sample to the range [-theta, theta]."""
    if theta <= 0.0:
        raise ValueError("clipping threshold must be positive")
    return Signal(np.clip(x.samples, -theta, theta), x.sample_rate)


def masks_from_clipped(y: Signal, theta: float, eps: float = 0.0) -> SampleMask:
    """Label each sample of an observed clipped signal.

    Samples within ``eps`` of +theta (-theta) are marked clipped-high
    (clipped-low); the rest are reliable. ``eps`` defaults to 0, which is
    exact for synthetically clipped data; real-world recordings with
    dithered plateaus need a small positive tolerance.
    """
    if theta <= 0.0:
        raise ValueError("clipping threshold must be positive")
    if eps < 0.0:
        raise ValueError("tolerance must be nonnegative")
    v = y.samples
    if np.any(np.abs(v) > theta + eps):
        worst = float(np.max(np.abs(v)))
        raise ValueError(
            f"sample magnitude {worst:.6g} exceeds threshold {theta:.6g} "
            f"by more than eps={eps:.3g}; input is inconsistent with clipping"
        )
    high = v >= theta - eps
    low = v <= -theta + eps
    # a sample can satisfy both only when eps >= theta; keep the partition valid
    low &= ~high
    return SampleMask(~(high | low), high, low)


def threshold_for_input_sdr(
    x: Signal,
    target_sdr: float,
    tol_db: float = 1e-3,
    max_iter: int = 200,
) -> float:
    """Find theta so that sdr(x, hard_clip(x, theta)) hits a target in dB.

    Uses bisection on theta in (0, max|x|], exploiting that the input SDR is
    nondecreasing in theta (it tends to +inf as theta approaches the peak and
    to the clip-everything floor as theta tends to 0).
    """
    v = x.samples
    peak = float(np.max(np.abs(v)))
    if peak == 0.0:
        raise ValueError("cannot clip an all-zero signal")
    floor_sdr = _sdr_arrays(v, np.clip(v, -peak * 1e-12, peak * 1e-12))
    if target_sdr <= floor_sdr:
        raise ValueError(
            f"target input SDR {target_sdr:.3f} dB is unachievable; "
            f"the limit as theta -> 0 is {floor_sdr:.3f} dB"
        )
    lo, hi = 0.0, peak
    mid = peak
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        achieved = _sdr_arrays(v, np.clip(v, -mid, mid))
        if achieved < target_sdr:
            lo = mid
        else:
            hi = mid
        if hi - lo <= peak * 1e-13:
            break
    mid = 0.5 * (lo + hi)
    achieved = _sdr_arrays(v, np.clip(v, -mid, mid))
    if abs(achieved - target_sdr) > tol_db:
        raise ValueError(
            f"bisection stalled at {achieved:.6f} dB for target "
            f"{target_sdr:.6f} dB (tolerance {tol_db} dB)"
        )
    return mid
