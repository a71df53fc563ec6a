"""
Multipath echo synthesis with delayed, Doppler-shifted copies of the frame.
"""
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from app.env.scene import PathParams
from app.signal.waveform import Beamformer, TxFrame, complex_normal, steering_vector


@dataclass
class EchoFrame:
    R: np.ndarray
    frame_len: int
    max_delay_index: int

    @property
    def nr(self) -> int:
        return self.R.shape[0]


def doppler_phases(k: float, frame_len: int) -> np.ndarray:
    return np.exp(2j * np.pi * k * np.arange(frame_len))


def synthesize_echo(paths: Sequence[PathParams], beamformer: Beamformer, frame: TxFrame,
                    sigma_z2: float, rng: np.random.Generator, nr: int,
                    max_delay_index: int = 100) -> EchoFrame:
    """
    Sum of beta * b(theta) a(theta)^H F S, delayed by l and Doppler-shifted by k, plus noise.

    Args:
        paths: Ground-truth paths; dead paths contribute nothing
        beamformer: Transmit beamformer for this slot
        frame: Transmit frame S (ns x L)
        sigma_z2: Noise variance per entry, 0 disables the noise draw
        rng: Noise stream
        nr: Receive antennas
        max_delay_index: Guard interval l_max; R has L + l_max columns

    Raises:
        ValueError: If an alive path is delayed beyond the guard interval
    """
    if sigma_z2 < 0:
        raise ValueError(f"noise variance must be non-negative, got {sigma_z2}")
    L = frame.frame_len
    R = np.zeros((nr, L + max_delay_index), dtype=complex)
    F = beamformer.F
    for path in paths:
        if not path.alive:
            continue
        if not 0 <= path.delay_index <= max_delay_index:
            raise ValueError(
                f"path {path.path_id} delay index {path.delay_index} exceeds max_delay_index={max_delay_index}"
            )
        tx = steering_vector(path.aoa, beamformer.nt).conj() @ F @ frame.S
        echo = path.gain * np.outer(steering_vector(path.aoa, nr), tx * doppler_phases(path.doppler_index, L))
        R[:, path.delay_index:path.delay_index + L] += echo
    if sigma_z2 > 0:
        R += complex_normal(rng, R.shape, sigma_z2)
    return EchoFrame(R=R, frame_len=L, max_delay_index=max_delay_index)
