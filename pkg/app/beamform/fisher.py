"""
Fisher information and CRB of a path angle under a given beamformer.
"""
from typing import Literal

import numpy as np

from app.signal.waveform import steering_vector

FisherModel = Literal["printed", "exact"]


def _rx_derivative(theta: float, nr: int) -> np.ndarray:
    n = np.arange(nr)
    return -1j * np.pi * np.sin(theta) * n * steering_vector(theta, nr)


def fisher_info(theta: float, gain: float, F: np.ndarray, frame_len: int, sigma_z2: float, nr: int) -> float:
    """
    J = L^2 |beta|^2 / sigma_z2 * ||(F^T kron db/dtheta) a*(theta)||^2.

    Only the receive-side derivative enters; the vectorized norm factors as
    ||db/dtheta||^2 * ||F^T a*(theta)||^2.
    """
    per_beam = np.abs(F.T @ steering_vector(theta, F.shape[0]).conj()) ** 2
    db2 = np.sum(np.abs(_rx_derivative(theta, nr)) ** 2)
    norm2 = db2 * np.sum(per_beam)
    if sigma_z2 <= 0:
        return np.inf if norm2 * gain > 0 else 0.0
    return float(frame_len ** 2 * abs(gain) ** 2 / sigma_z2 * norm2)


def exact_fisher_info(theta: float, gain: float, F: np.ndarray, frame_len: int, sigma_z2: float, nr: int) -> float:
    """
    Fisher information of theta for r = L beta c(theta) + n, n ~ CN(0, sigma_z2 L I).

    c(theta) = vec(b(theta) a(theta)^H F) is differentiated on both array
    sides and the complex gain is treated as a nuisance parameter.
    """
    nt = F.shape[0]
    a = steering_vector(theta, nt)
    b = steering_vector(theta, nr)
    da = -1j * np.pi * np.sin(theta) * np.arange(nt) * a
    db = _rx_derivative(theta, nr)
    w = a.conj() @ F
    dw = da.conj() @ F
    c = np.outer(b, w).ravel()
    dc = (np.outer(db, w) + np.outer(b, dw)).ravel()
    c2 = np.vdot(c, c).real
    if c2 <= 0:
        return 0.0
    projected = np.vdot(dc, dc).real - abs(np.vdot(c, dc)) ** 2 / c2
    if sigma_z2 <= 0:
        return np.inf if projected * gain > 0 else 0.0
    return float(2.0 * frame_len * abs(gain) ** 2 / sigma_z2 * max(projected, 0.0))


def crb(theta: float, gain: float, F: np.ndarray, frame_len: int, sigma_z2: float, nr: int,
        model: FisherModel = "printed") -> float:
    """1 / J, +inf when the angle is unestimable"""
    info = fisher_info if model == "printed" else exact_fisher_info
    J = info(theta, gain, F, frame_len, sigma_z2, nr)
    if J == 0:
        return np.inf
    return float(1.0 / J)
