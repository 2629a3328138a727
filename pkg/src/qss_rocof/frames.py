"""abc -> alpha-beta-gamma space vector (amplitude-invariant Clarke transform)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signals import SampledWaveform

SQRT3 = np.sqrt(3.0)

# rows: alpha, beta, gamma
CLARKE_MATRIX = np.array([
    [2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0],
    [0.0, 1.0 / SQRT3, -1.0 / SQRT3],
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
])


@dataclass(frozen=True)
class SpaceVectorTrace:
    sample_rate_hz: float
    v: np.ndarray      # shape (n, 3)
    mag2: np.ndarray   # shape (n,)
    t0_s: float = 0.0

    @classmethod
    def from_vectors(cls, v, sample_rate_hz: float, t0_s: float = 0.0) -> "SpaceVectorTrace":
        v = np.asarray(v, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("space vectors must have shape (n, 3)")
        return cls(sample_rate_hz, v, np.einsum("ij,ij->i", v, v), t0_s)

    def __len__(self) -> int:
        return self.v.shape[0]

    @property
    def time(self) -> np.ndarray:
        return self.t0_s + np.arange(len(self)) / self.sample_rate_hz


def clarke(waveform: SampledWaveform) -> SpaceVectorTrace:
    va, vb, vc = waveform.phases
    alpha = (2.0 * va - vb - vc) / 3.0
    beta = (vb - vc) / SQRT3
    gamma = (va + vb + vc) / 3.0
    return SpaceVectorTrace.from_vectors(
        np.column_stack([alpha, beta, gamma]), waveform.sample_rate_hz, waveform.t0_s
    )
