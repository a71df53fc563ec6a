"""
Angular grid, beliefs and transition models of the Markov beam tracker.

The temporal TPM is banded and the CKM TPM has identical rows, so neither
n_theta x n_theta matrix is ever built.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Tuple

import numpy as np
from scipy.signal import convolve

from app.signal.waveform import steering_matrix

PMF_TOLERANCE = 1e-12


class TransitionKind(str, Enum):
    STATIONARY = "stationary"
    PREDICTABLE = "predictable"
    UNPREDICTABLE = "unpredictable"


@dataclass(eq=False)
class AngularGrid:
    """theta_k = pi * k / n_theta for k = 0..n_theta-1"""
    n_theta: int
    _steering: Dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.n_theta < 2:
            raise ValueError(f"n_theta must be at least 2, got {self.n_theta}")
        self.angles = np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def step(self) -> float:
        return np.pi / self.n_theta

    def nearest_index(self, theta: float) -> int:
        return int(np.clip(np.rint(theta / self.step), 0, self.n_theta - 1))

    def steering(self, n: int) -> np.ndarray:
        """Cached (n, n_theta) steering matrix over the whole grid"""
        if n not in self._steering:
            self._steering[n] = steering_matrix(self.angles, n)
        return self._steering[n]


@dataclass(frozen=True)
class AngularBelief:
    pmf: np.ndarray

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        if np.any(pmf < 0) or abs(pmf.sum() - 1.0) > 1e-9:
            raise ValueError("belief must be a non-negative vector summing to 1")
        object.__setattr__(self, "pmf", pmf / pmf.sum())

    @classmethod
    def uniform(cls, n_theta: int) -> "AngularBelief":
        return cls(np.full(n_theta, 1.0 / n_theta))

    @classmethod
    def one_hot(cls, n_theta: int, index: int) -> "AngularBelief":
        pmf = np.zeros(n_theta)
        pmf[index] = 1.0
        return cls(pmf)

    @property
    def entropy(self) -> float:
        p = self.pmf[self.pmf > 0]
        return float(-np.sum(p * np.log(p)))


@dataclass(frozen=True)
class TransitionSpec:
    kind: TransitionKind
    c_pi: float = 0.6
    xi: float = 0.8
    band_halfwidth: int = 1
    sigma_ckm: float = 1e-3
    predicted_angle: float = np.pi / 2

    def __post_init__(self):
        if not 0.0 <= self.c_pi <= 1.0:
            raise ValueError(f"c_pi must lie in [0, 1], got {self.c_pi}")
        if not 0.0 <= self.xi <= 1.0:
            raise ValueError(f"xi must lie in [0, 1], got {self.xi}")
        if self.band_halfwidth < 0:
            raise ValueError(f"band half-width must be non-negative, got {self.band_halfwidth}")


def band_halfwidth(speed: float, dt: float, los_angle: float, n_theta: int,
                   divisor: float = 20.0, minimum: int = 1) -> int:
    """Band from per-slot displacement: |v| dt |sin(theta_1)| n_theta / divisor cells"""
    return max(minimum, int(round(abs(speed) * dt * abs(np.sin(los_angle)) * n_theta / divisor)))


def tpm_temporal_row_weights(xi: float, eps: int) -> np.ndarray:
    """Normalized zeta * xi^|o| for offsets -eps..eps"""
    offsets = np.abs(np.arange(-eps, eps + 1))
    weights = np.power(xi, offsets, dtype=float)  # numpy keeps 0**0 == 1
    return weights / weights.sum()


def tpm_ckm_row(predicted_angle: float, sigma_ckm: float, grid: AngularGrid) -> AngularBelief:
    """Discretized Gaussian around the CKM-predicted angle, shared by every source state"""
    if sigma_ckm <= 0:
        raise ValueError(f"sigma_ckm must be positive, got {sigma_ckm}")
    logits = -((grid.angles - predicted_angle) ** 2) / (2.0 * sigma_ckm ** 2)
    row = np.exp(logits - logits.max())
    return AngularBelief(row / row.sum())


def _banded_pass(pmf: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """
    sum_k p(k) Pi(k, j) with row k renormalized over its in-grid band.

    Boundary rows are renormalized, so the output mass equals the input mass.
    """
    eps = (len(weights) - 1) // 2
    n = len(pmf)
    cumulative = np.concatenate([[0.0], np.cumsum(weights)])
    k = np.arange(n)
    lo = np.clip(eps - k, 0, len(weights))
    hi = np.clip(eps + (n - 1 - k) + 1, 0, len(weights))
    row_mass = cumulative[hi] - cumulative[lo]
    return convolve(pmf / row_mass, weights, mode="same", method="direct")


def propagate_belief(belief: AngularBelief, spec: TransitionSpec, grid: AngularGrid) -> AngularBelief:
    """
    One Markov step of a path's AoA belief.

    stationary: (1 - c_pi) * banded temporal pass + c_pi * CKM row
    predictable: CKM row alone
    unpredictable: uniform
    """
    if spec.kind == TransitionKind.UNPREDICTABLE:
        return AngularBelief.uniform(grid.n_theta)
    ckm_row = tpm_ckm_row(spec.predicted_angle, spec.sigma_ckm, grid).pmf
    if spec.kind == TransitionKind.PREDICTABLE or spec.c_pi == 1.0:
        return AngularBelief(ckm_row)
    temporal = _banded_pass(belief.pmf, tpm_temporal_row_weights(spec.xi, spec.band_halfwidth))
    fused = (1.0 - spec.c_pi) * np.maximum(temporal, 0.0) + spec.c_pi * ckm_row
    return AngularBelief(fused / fused.sum())


def hard_predict(belief: AngularBelief, grid: AngularGrid) -> float:
    """Grid angle of the largest mass; ties go to the lowest index"""
    return float(grid.angles[int(np.argmax(belief.pmf))])


def support(belief: AngularBelief, threshold: float = PMF_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """Indices and masses of grid points above threshold"""
    idx = np.flatnonzero(belief.pmf > threshold)
    return idx, belief.pmf[idx]
