"""
Array steering vectors, transmit frames and beamformers.
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np


def steering_vector(theta: float, n: int) -> np.ndarray:
    """Half-wavelength ULA response, element m = exp(j*pi*m*cos(theta))"""
    if n < 1:
        raise ValueError(f"array size must be at least 1, got {n}")
    return np.exp(1j * np.pi * np.arange(n) * np.cos(theta))


def steering_matrix(angles: Sequence[float], n: int) -> np.ndarray:
    """Columns are steering vectors, shape (n, len(angles))"""
    if n < 1:
        raise ValueError(f"array size must be at least 1, got {n}")
    return np.exp(1j * np.pi * np.outer(np.arange(n), np.cos(np.asarray(angles, dtype=float))))


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """I.i.d. circular complex Gaussian entries with the given variance"""
    draws = rng.standard_normal((2, *np.atleast_1d(shape)))
    return np.sqrt(variance / 2.0) * (draws[0] + 1j * draws[1])


@dataclass(frozen=True)
class TxFrame:
    S: np.ndarray

    @property
    def ns(self) -> int:
        return self.S.shape[0]

    @property
    def frame_len(self) -> int:
        return self.S.shape[1]


def draw_frame(ns: int, frame_len: int, rng: np.random.Generator) -> TxFrame:
    return TxFrame(S=complex_normal(rng, (ns, frame_len)))


@dataclass(frozen=True)
class Beamformer:
    """F = A diag(sqrt(gamma)); A holds unit-modulus steering columns"""
    A: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        gamma = np.asarray(self.gamma, dtype=float)
        if gamma.shape != (self.A.shape[1],):
            raise ValueError(f"gamma must have {self.A.shape[1]} entries, got shape {gamma.shape}")
        if np.any(gamma < 0):
            raise ValueError("beam powers must be non-negative")
        object.__setattr__(self, "gamma", gamma)

    @property
    def F(self) -> np.ndarray:
        return self.A * np.sqrt(self.gamma)[np.newaxis, :]

    @property
    def nt(self) -> int:
        return self.A.shape[0]

    @property
    def ns(self) -> int:
        return self.A.shape[1]

    @property
    def total_power(self) -> float:
        """||F||_F^2 = nt * sum(gamma)"""
        return float(np.sum(np.abs(self.F) ** 2))

    @classmethod
    def single_beam(cls, theta: float, nt: int, ns: int, budget: float) -> "Beamformer":
        """All columns steer to theta, the whole budget on the first one"""
        A = np.tile(steering_vector(theta, nt)[:, np.newaxis], (1, ns))
        gamma = np.zeros(ns)
        gamma[0] = budget
        return cls(A=A, gamma=gamma)
