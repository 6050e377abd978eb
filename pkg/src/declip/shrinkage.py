"""Hinge and the empirical-Wiener family of time-frequency shrinkages."""

from dataclasses import dataclass

import numpy as np

from .frames import TFCoeffs


def hinge(v: np.ndarray) -> np.ndarray:
    """Identity for negative arguments, zero otherwise (elementwise)."""
    return np.minimum(np.asarray(v, dtype=np.float64), 0.0)


@dataclass
class NeighborhoodShape:
    """Centered time-frequency neighborhood used for persistent shrinkage.

    Extents are odd sample counts (frames x bins). Optional weights are a
    (freq_extent x time_extent) nonnegative array with a positive center;
    unweighted neighborhoods use all ones. Offsets falling outside the grid
    contribute zero energy.
    """

    time_extent: int = 3
    freq_extent: int = 1
    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.time_extent < 1 or self.time_extent % 2 == 0:
            raise ValueError("time extent must be an odd positive integer")
        if self.freq_extent < 1 or self.freq_extent % 2 == 0:
            raise ValueError("frequency extent must be an odd positive integer")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=np.float64)
            if self.weights.shape != (self.freq_extent, self.time_extent):
                raise ValueError(
                    "weights must be shaped (freq_extent, time_extent)"
                )
            if np.any(self.weights < 0.0):
                raise ValueError("weights must be nonnegative")
            if self.weights[self.freq_extent // 2, self.time_extent // 2] <= 0.0:
                raise ValueError("center weight must be positive")

    @classmethod
    def singleton(cls) -> "NeighborhoodShape":
        """The 1x1 neighborhood that reduces PEW to classical EW."""
        return cls(time_extent=1, freq_extent=1)

    def weight_grid(self) -> np.ndarray:
        if self.weights is not None:
            return self.weights
        return np.ones((self.freq_extent, self.time_extent))


def neighborhood_energy(
    z: TFCoeffs, f: int, t: int, shape: NeighborhoodShape
) -> float:
    """Weighted squared-magnitude sum over the neighborhood centered at (f, t)."""
    n_f, n_t = z.grid.shape
    if not (0 <= f < n_f and 0 <= t < n_t):
        raise ValueError(f"center ({f}, {t}) outside grid {z.grid.shape}")
    weights = shape.weight_grid()
    half_f, half_t = shape.freq_extent // 2, shape.time_extent // 2
    total = 0.0
    for i in range(shape.freq_extent):
        for j in range(shape.time_extent):
            fi, tj = f + i - half_f, t + j - half_t
            if 0 <= fi < n_f and 0 <= tj < n_t:
                total += weights[i, j] * abs(z.grid[fi, tj]) ** 2
    return total


def _energy_grid(power: np.ndarray, shape: NeighborhoodShape) -> np.ndarray:
    """Neighborhood energies for every grid point (zero-padded at the edges)."""
    if shape.time_extent == 1 and shape.freq_extent == 1 and shape.weights is None:
        return power
    n_f, n_t = power.shape
    half_f, half_t = shape.freq_extent // 2, shape.time_extent // 2
    energy = np.zeros_like(power)
    for i in range(shape.freq_extent):
        for j in range(shape.time_extent):
            w = 1.0 if shape.weights is None else shape.weights[i, j]
            if w == 0.0:
                continue
            df, dt = i - half_f, j - half_t
            dst_f = slice(max(0, -df), n_f - max(0, df))
            dst_t = slice(max(0, -dt), n_t - max(0, dt))
            src_f = slice(max(0, df), n_f + min(0, df))
            src_t = slice(max(0, dt), n_t + min(0, dt))
            if w == 1.0:
                energy[dst_f, dst_t] += power[src_f, src_t]
            else:
                energy[dst_f, dst_t] += w * power[src_f, src_t]
    return energy


def pew_gain(grid: np.ndarray, lam: float, shape: NeighborhoodShape) -> np.ndarray:
    """Per-coefficient gain max(1 - lam^2/E, 0), E from the input snapshot.

    Coefficients whose neighborhood energy is zero get gain 0.
    """
    if lam < 0.0:
        raise ValueError("shrinkage weight lambda must be nonnegative")
    power = grid.real * grid.real + grid.imag * grid.imag
    energy = _energy_grid(power, shape)
    if lam == 0.0:  # identity: zero-energy neighborhoods only occur at zeros
        return np.ones_like(energy)
    with np.errstate(divide="ignore"):
        gain = 1.0 - (lam * lam) / energy  # -inf where the energy is zero
    return np.maximum(gain, 0.0, out=gain)


def pew_shrink(z: TFCoeffs, lam: float, shape: NeighborhoodShape) -> TFCoeffs:
    """Persistent empirical Wiener: scale each coefficient by its
    neighborhood-energy gain. Gains are computed from a snapshot of the
    input grid, so the result is independent of evaluation order."""
    gain = pew_gain(z.grid, lam, shape)
    return TFCoeffs(z.grid * gain, z.params, z.signal_length, z.sample_rate)


def ew_shrink(z: TFCoeffs, lam: float) -> TFCoeffs:
    """Classical empirical Wiener: PEW with the singleton neighborhood."""
    return pew_shrink(z, lam, NeighborhoodShape.singleton())
