"""Consistency postprocessing: reliable-sample replacement and crossfading.

Replacement (RR) overwrites reliable samples of a reconstruction with the
observed values, which restores consistency but can leave sharp jumps at
the borders of clipped regions. Crossfading (CR) additionally blends the
reconstruction into the observation with short gain ramps near every
border between a clipped run and a reliable run.
"""

import math
from dataclasses import dataclass

import numpy as np

from .signals import SampleMask, Signal

_PLACEMENTS = ("reliable", "clipped", "middle")
_SHAPES = ("linear", "sine_squared")
_SHORT_POLICIES = ("ignore", "replace", "shorten")


@dataclass
class CrossfadeConfig:
    """Where, how, and how long to crossfade at clipped/reliable borders.

    ``short_policy`` governs runs too short for the requested ramp length:
    ``shorten`` adapts the ramp to the run, ``ignore``/``replace`` skip the
    ramp (the replacement pass has already been applied either way). With
    ``strict_ignore`` set, ``ignore`` additionally keeps the raw
    reconstruction on short reliable runs, skipping their replacement too.
    """

    placement: str = "reliable"
    shape: str = "sine_squared"
    length_w: int = 8
    short_policy: str = "shorten"
    strict_ignore: bool = False

    def __post_init__(self):
        if self.placement not in _PLACEMENTS:
            raise ValueError(f"placement must be one of {_PLACEMENTS}")
        if self.shape not in _SHAPES:
            raise ValueError(f"shape must be one of {_SHAPES}")
        if self.length_w < 1:
            raise ValueError("crossfade length must be at least 1 sample")
        if self.short_policy not in _SHORT_POLICIES:
            raise ValueError(f"short policy must be one of {_SHORT_POLICIES}")


def replace_reliable(recon: Signal, y: Signal, mask: SampleMask) -> Signal:
    """Substitute the observed values on all reliable samples."""
    if len(recon) != len(y) or len(mask) != len(y):
        raise ValueError("reconstruction, observation, and mask lengths differ")
    return Signal(
        np.where(mask.reliable, y.samples, recon.samples), recon.sample_rate
    )


def crossfade_weights(w: int, shape: str) -> np.ndarray:
    """Fade-out gains g[0..w-1] for the reconstruction, k = 0 at the border.

    Gains decrease strictly from g[0] < 1 toward (but never reaching) 0, so
    the border sample already moves toward the observation and the first
    sample after the ramp is exactly observed. The complementary fade-in is
    1 - g, and reversing g gives that fade-in: g[k] + g[w-1-k] = 1.
    """
    if w < 1:
        raise ValueError("crossfade length must be at least 1 sample")
    k = np.arange(w)
    if shape == "linear":
        return (w - k) / (w + 1.0)
    if shape == "sine_squared":
        return np.cos(np.pi * (k + 1) / (2.0 * (w + 1))) ** 2
    raise ValueError(f"shape must be one of {_SHAPES}")


def _binary_runs(mask: SampleMask) -> list[tuple[int, int, bool]]:
    """Maximal runs of (start, end inclusive, is_reliable)."""
    rel = mask.reliable
    boundaries = np.flatnonzero(np.diff(rel)) + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries - 1, [rel.size - 1]))
    return [(int(s), int(e), bool(rel[s])) for s, e in zip(starts, ends)]


def _one_sided_lengths(w: int, length: int, borders: int, policy: str) -> int:
    """Ramp length a run can host on each of its ``borders`` sides."""
    if borders == 0:
        return 0
    needed = borders * w
    if length >= needed:
        return w
    if policy in ("ignore", "replace"):
        return 0
    return length // 2 if borders == 2 else length  # shorten


def _middle_lengths(
    w: int, cap_reliable: int, cap_clipped: int, policy: str
) -> tuple[int, int]:
    """Split of the ramp across a border: (reliable side, clipped side).

    The reliable side takes ceil(v/2) and the clipped side floor(v/2);
    ``shorten`` reduces the total v until both sides fit their runs.
    """
    if policy in ("ignore", "replace"):
        v = w if (math.ceil(w / 2) <= cap_reliable and w // 2 <= cap_clipped) else 0
    else:
        v = min(w, 2 * cap_reliable, 2 * cap_clipped + 1)
    if v < 1:
        return 0, 0
    return math.ceil(v / 2), v // 2


def crossfade_reliable(
    recon: Signal, y: Signal, mask: SampleMask, cfg: CrossfadeConfig | None = None
) -> Signal:
    """Replacement followed by gain ramps at every clipped/reliable border.

    Ramps are convex combinations of the reconstruction and the observation;
    every output sample lies between the two inputs. With ``reliable``
    placement, clipped samples are returned untouched and reliable samples
    beyond the ramps equal the observation.
    """
    if cfg is None:
        cfg = CrossfadeConfig()
    if len(recon) != len(y) or len(mask) != len(y):
        raise ValueError("reconstruction, observation, and mask lengths differ")
    out = np.where(mask.reliable, y.samples, recon.samples)
    runs = _binary_runs(mask)
    if len(runs) == 1:  # degenerate mask: nothing to blend
        return Signal(out, recon.sample_rate)

    r = recon.samples
    obs = y.samples
    n = len(runs)
    w = cfg.length_w

    if cfg.placement in ("reliable", "clipped"):
        want_reliable = cfg.placement == "reliable"
        for idx, (start, end, is_reliable) in enumerate(runs):
            if is_reliable != want_reliable:
                continue
            borders = int(idx > 0) + int(idx < n - 1)
            length = end - start + 1
            v = _one_sided_lengths(w, length, borders, cfg.short_policy)
            if v == 0:
                if (
                    is_reliable
                    and cfg.short_policy == "ignore"
                    and cfg.strict_ignore
                    and borders > 0
                ):
                    out[start : end + 1] = r[start : end + 1]
                continue
            gains = crossfade_weights(v, cfg.shape)
            # recon weight on reliable ramps, observation weight on clipped ones
            for k in range(v):
                g = gains[k]
                if idx > 0:  # border on the left; k = 0 at the border
                    p = start + k
                    if want_reliable:
                        out[p] = g * r[p] + (1.0 - g) * obs[p]
                    else:
                        out[p] = (1.0 - g) * r[p] + g * obs[p]
                if idx < n - 1:  # border on the right
                    p = end - k
                    if want_reliable:
                        out[p] = g * r[p] + (1.0 - g) * obs[p]
                    else:
                        out[p] = (1.0 - g) * r[p] + g * obs[p]
        return Signal(out, recon.sample_rate)

    # middle placement: one monotone ramp straddling each border
    for idx in range(n - 1):
        left = runs[idx]
        right = runs[idx + 1]
        border = right[0]
        rel_run, clip_run = (left, right) if left[2] else (right, left)
        rel_len = rel_run[1] - rel_run[0] + 1
        clip_len = clip_run[1] - clip_run[0] + 1
        rel_borders = int(rel_run[0] > 0) + int(rel_run[1] < len(y) - 1)
        clip_borders = int(clip_run[0] > 0) + int(clip_run[1] < len(y) - 1)
        cap_rel = rel_len // 2 if rel_borders == 2 else rel_len
        cap_clip = clip_len // 2 if clip_borders == 2 else clip_len
        w_rel, w_clip = _middle_lengths(w, cap_rel, cap_clip, cfg.short_policy)
        v = w_rel + w_clip
        if v == 0:
            continue
        gains = crossfade_weights(v, cfg.shape)
        if left[2]:  # reliable -> clipped: ramp ends w_clip deep into the run
            positions = np.arange(border + w_clip - 1, border - w_rel - 1, -1)
        else:  # clipped -> reliable: ramp starts w_clip before the border
            positions = np.arange(border - w_clip, border + w_rel)
        for g, p in zip(gains, positions):
            out[p] = g * r[p] + (1.0 - g) * obs[p]
    return Signal(out, recon.sample_rate)
