"""Synthetic thermal-like ground truth and the four perturbation scenarios.

The ground truth is an exactly low-rank space-time product: smooth spatial
profiles (Gaussian bumps at seeded locations) times sinusoid-plus-drift
temporal coefficients.  Perturbations are drawn from per-frame substreams
of a fully specified PRNG so every output is bit-identical per seed.

Scenarios:
  1 noise        - additive Gaussian, mean 0, std 4
  2 outliers     - 100 entries per frame replaced by values in
                   [30, 40] or [-40, -30] (fair coin per entry)
  3 corruptions  - additive uniform [-15, 30] on 10% of entries
  4 superposition- 1, then 2, then 3, in that fixed order
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ValidationError
from .linalg import validate_matrix
from .rng import Xoshiro256pp, substream


class Scenario(enum.IntEnum):
    NOISE = 1
    OUTLIERS = 2
    CORRUPTIONS = 3
    SUPERPOSITION = 4


@dataclass(frozen=True)
class GroundTruthSpec:
    m: int
    n: int
    rank: int
    smoothness: float = 0.08   # bump width as a fraction of the spatial dimension
    temporal_freqs: tuple[float, ...] | None = None
    amplitude: float = 10.0
    seed: int = 0

    def validate(self) -> None:
        if self.m < 1 or self.n < 1:
            raise ValidationError("dimensions must be positive")
        if not 1 <= self.rank <= min(self.m, self.n):
            raise BoundsError(f"rank {self.rank} outside [1, {min(self.m, self.n)}]")
        if self.smoothness <= 0:
            raise ValidationError("smoothness must be positive")


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: Scenario = Scenario.NOISE
    noise_std: float = 4.0
    n_outliers: int = 100
    outlier_ranges: tuple[tuple[float, float], tuple[float, float]] = ((30.0, 40.0), (-40.0, -30.0))
    corruption_fraction: float = 0.10
    corruption_interval: tuple[float, float] = (-15.0, 30.0)
    seed: int = 0
    per_frame: bool = True   # redraw perturbed positions for every time column

    def validate(self, m: int, n: int) -> None:
        if not 0.0 <= self.corruption_fraction <= 1.0:
            raise ValidationError("corruption_fraction must lie in [0, 1]")
        for lo, hi in (*self.outlier_ranges, self.corruption_interval):
            if lo > hi:
                raise ValidationError(f"interval ({lo}, {hi}) is not ordered")
        if self.n_outliers < 0:
            raise ValidationError("n_outliers must be nonnegative")
        limit = m if self.per_frame else m * n
        if self.scenario in (Scenario.OUTLIERS, Scenario.SUPERPOSITION) and self.n_outliers > limit:
            raise ValidationError(f"n_outliers {self.n_outliers} exceeds {limit} available entries")
        if self.noise_std < 0:
            raise ValidationError("noise_std must be nonnegative")


def generate_ground_truth(spec: GroundTruthSpec) -> np.ndarray:
    """Exactly rank-`spec.rank` space-time matrix, deterministic per seed."""
    spec.validate()
    rng = Xoshiro256pp(spec.seed)
    m, n, rank = spec.m, spec.n, spec.rank
    rows = np.arange(m, dtype=np.float64)
    t = np.arange(n, dtype=np.float64) / max(n, 2)
    X = np.zeros((m, n))
    for k in range(rank):
        center = rng.uniform(0.1 * m, 0.9 * m)
        width = spec.smoothness * m * (0.5 + rng.random())
        u = np.exp(-((rows - center) ** 2) / (2.0 * width * width))
        if spec.temporal_freqs is not None:
            freq = spec.temporal_freqs[k % len(spec.temporal_freqs)]
        else:
            # distinct integer-offset frequencies keep the factors well separated
            freq = k + 1 + rng.random()
        phase = rng.uniform(0.0, 2.0 * math.pi)
        drift = rng.uniform(-0.5, 0.5)
        amp = spec.amplitude / (1.0 + 0.5 * k)
        w = amp * (np.sin(2.0 * math.pi * freq * t + phase) + drift * t)
        X += np.outer(u, w)
    return X


def _perturb_noise(frame: np.ndarray, rng: Xoshiro256pp, std: float) -> None:
    frame += rng.normals(frame.shape[0], std=std)


def _perturb_outliers(frame: np.ndarray, rng: Xoshiro256pp,
                      spec: ScenarioSpec, touched: np.ndarray) -> None:
    idx = rng.sample_without_replacement(frame.shape[0], spec.n_outliers)
    for i in idx:
        lo, hi = spec.outlier_ranges[1] if rng.coin() else spec.outlier_ranges[0]
        frame[i] = rng.uniform(lo, hi)
    touched[idx] = True


def _perturb_corruptions(frame: np.ndarray, rng: Xoshiro256pp,
                         spec: ScenarioSpec, touched: np.ndarray) -> None:
    k = round(spec.corruption_fraction * frame.shape[0])
    idx = rng.sample_without_replacement(frame.shape[0], k)
    lo, hi = spec.corruption_interval
    for i in idx:
        frame[i] += rng.uniform(lo, hi)
    touched[idx] = True


# substream index offsets keep the three perturbation kinds statistically
# independent even when superposed on the same frame
_COMPONENT_STRIDE = 1 << 32


def apply_scenario(X, spec: ScenarioSpec) -> tuple[np.ndarray, np.ndarray]:
    """Perturb X per the scenario; returns (perturbed, mask).

    The boolean mask marks positions touched by the outlier/corruption
    components (scenarios 2 and 3); additive noise is not masked.
    """
    X = validate_matrix(X)
    m, n = X.shape
    spec.validate(m, n)
    out = X.copy()
    mask = np.zeros((m, n), dtype=bool)
    sc = Scenario(spec.scenario)

    if spec.per_frame:
        frames = range(n)
    else:
        # single flattened draw over the whole matrix
        out = out.reshape(m * n, 1)
        mask = mask.reshape(m * n, 1)
        frames = range(1)

    for j in frames:
        col = out[:, j]
        touched = mask[:, j]
        if sc in (Scenario.NOISE, Scenario.SUPERPOSITION):
            _perturb_noise(col, substream(spec.seed, 1 * _COMPONENT_STRIDE + j), spec.noise_std)
        if sc in (Scenario.OUTLIERS, Scenario.SUPERPOSITION):
            _perturb_outliers(col, substream(spec.seed, 2 * _COMPONENT_STRIDE + j), spec, touched)
        if sc in (Scenario.CORRUPTIONS, Scenario.SUPERPOSITION):
            _perturb_corruptions(col, substream(spec.seed, 3 * _COMPONENT_STRIDE + j), spec, touched)

    out = out.reshape(m, n)
    mask = mask.reshape(m, n)
    return out, mask
