"""
Per-path angle likelihood of a separated echo block.

The unknown complex gain is profiled out by least squares, so the
log-likelihood of a candidate angle only depends on how much of the block
energy the rank-one model b(theta) a(theta)^H F captures.
"""
from typing import Optional

import numpy as np

from app.signal.waveform import steering_matrix

# Noise floor substituted for a noiseless receiver (W)
MIN_NOISE_POWER = 1e-30


def _model_terms(R_i: np.ndarray, F: np.ndarray, tx_steering: np.ndarray, rx_steering: np.ndarray):
    """c(theta)^H r and ||c(theta)||^2 for every steering column"""
    w = tx_steering.conj().T @ F                 # a(theta)^H F, (m, ns)
    proj = rx_steering.conj().T @ R_i            # b(theta)^H R_i, (m, ns)
    corr = np.sum(proj * w.conj(), axis=1)
    norm2 = rx_steering.shape[0] * np.sum(np.abs(w) ** 2, axis=1)
    return corr, norm2


def profile_loglik_grid(R_i: np.ndarray, F: np.ndarray, frame_len: int, sigma_z2: float,
                        tx_steering: np.ndarray, rx_steering: np.ndarray) -> np.ndarray:
    """
    Profile log-likelihood for each candidate angle given as steering columns.

    Returns:
        Array of log-likelihoods; -inf where the beamformer is orthogonal to the angle
    """
    sigma_z2 = max(sigma_z2, MIN_NOISE_POWER)
    energy = float(np.sum(np.abs(R_i) ** 2))
    corr, norm2 = _model_terms(R_i, F, tx_steering, rx_steering)
    # ||c||^2 <= nr * nt * ||F||_F^2; anything below this relative level is an orthogonal beam
    scale = rx_steering.shape[0] * tx_steering.shape[0] * float(np.sum(np.abs(F) ** 2))
    out = np.full(norm2.shape, -np.inf)
    ok = norm2 > 1e-12 * scale
    residual = energy - np.abs(corr[ok]) ** 2 / norm2[ok]
    out[ok] = -np.maximum(residual, 0.0) / (frame_len * sigma_z2)
    return out


def profile_loglik(R_i: np.ndarray, theta: float, F: np.ndarray, frame_len: int, sigma_z2: float) -> float:
    """-||r - L beta_hat c(theta)||^2 / (L sigma_z2) at one angle"""
    nt, nr = F.shape[0], R_i.shape[0]
    return float(profile_loglik_grid(
        R_i, F, frame_len, sigma_z2, steering_matrix([theta], nt), steering_matrix([theta], nr)
    )[0])


def gain_estimate(R_i: np.ndarray, theta: float, F: np.ndarray, frame_len: int) -> Optional[complex]:
    """Least-squares gain beta_hat = c^H r / (L ||c||^2), None when c vanishes"""
    nt, nr = F.shape[0], R_i.shape[0]
    corr, norm2 = _model_terms(R_i, F, steering_matrix([theta], nt), steering_matrix([theta], nr))
    if norm2[0] <= 1e-12 * nr * nt * float(np.sum(np.abs(F) ** 2)):
        return None
    return complex(corr[0] / (frame_len * norm2[0]))
