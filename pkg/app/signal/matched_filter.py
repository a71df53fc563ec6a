"""
Delay-Doppler matched filtering and per-path separation.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft
from scipy.ndimage import maximum_filter

from app.signal.echo import doppler_phases

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Peak:
    delay_index: int
    doppler_index: float
    power: float
    confident: bool = True
    # echo with the other detected paths cancelled; None means the raw echo
    echo: Optional[np.ndarray] = field(default=None, compare=False, repr=False)


@dataclass
class MatchedFilterResult:
    peaks: List[Peak]
    surface: np.ndarray
    threshold: float
    flags: List[str] = field(default_factory=list)

    @property
    def complete(self) -> bool:
        return "missing_peaks" not in self.flags


def noise_floor(sigma_z2: float, frame_len: int, nr: int, ns: int) -> float:
    """Expected ||R_i||_F^2 of a noise-only separation"""
    return sigma_z2 * frame_len * nr * ns


def detection_threshold(sigma_z2: float, frame_len: int, nr: int, ns: int,
                        detection_sigmas: float = 6.0) -> float:
    return noise_floor(sigma_z2, frame_len, nr, ns) * (1.0 + detection_sigmas / np.sqrt(nr * ns))


def matched_filter_surface(R: np.ndarray, S: np.ndarray, delay_grid: Sequence[int],
                           doppler_grid: Sequence[float]) -> np.ndarray:
    """
    ||R Lambda_k^H S_l^H||_F^2 on the delay x Doppler grid.

    One FFT cross-correlation per Doppler cell gives every delay at once.
    """
    delay_grid = np.asarray(delay_grid, dtype=int)
    L = S.shape[1]
    if np.any(delay_grid < 0) or np.any(delay_grid > R.shape[1] - L):
        raise ValueError("delay grid exceeds the echo window")
    n_fft = fft.next_fast_len(R.shape[1] + L)
    FR = fft.fft(R, n_fft, axis=1)
    surface = np.empty((len(delay_grid), len(doppler_grid)))
    for j, k in enumerate(doppler_grid):
        FD = fft.fft(S * doppler_phases(k, L)[np.newaxis, :], n_fft, axis=1)
        corr = fft.ifft(FR[:, np.newaxis, :] * FD.conj()[np.newaxis, :, :], axis=2)
        power = np.sum(np.abs(corr) ** 2, axis=(0, 1))
        surface[:, j] = power[delay_grid]
    return surface


def path_contribution(R: np.ndarray, S: np.ndarray, delay_index: int, doppler_index: float) -> np.ndarray:
    """Least-squares fit H S_k of one path, placed in an echo-sized array"""
    L = S.shape[1]
    S_k = S * doppler_phases(doppler_index, L)[np.newaxis, :]
    window = R[:, delay_index:delay_index + L]
    if window.shape[1] != L:
        raise ValueError(f"delay index {delay_index} leaves fewer than {L} samples in the echo")
    H = np.linalg.lstsq(S_k.T, window.T, rcond=None)[0].T
    out = np.zeros_like(R, dtype=complex)
    out[:, delay_index:delay_index + L] = H @ S_k
    return out


def cancel_path(R: np.ndarray, S: np.ndarray, delay_index: int, doppler_index: float) -> np.ndarray:
    """Echo with the fitted path removed"""
    return R - path_contribution(R, S, delay_index, doppler_index)


def _strongest_cell(surface: np.ndarray, blocked_rows: np.ndarray) -> Optional[Tuple[int, int]]:
    local_max = (maximum_filter(surface, size=3, mode="constant", cval=-np.inf) == surface) & (surface > 0)
    local_max[blocked_rows] = False
    if not local_max.any():
        return None
    masked = np.where(local_max, surface, -np.inf)
    row, col = np.unravel_index(int(np.argmax(masked)), surface.shape)
    return int(row), int(col)


def matched_filter_search(R: np.ndarray, S: np.ndarray, delay_grid: Sequence[int],
                          doppler_grid: Sequence[float], n_peaks: int,
                          sigma_z2: Optional[float] = None,
                          detection_sigmas: float = 6.0,
                          dynamic_range_db: float = 60.0) -> MatchedFilterResult:
    """
    Successive search for the n_peaks strongest paths of the matched-filter surface.

    Each detected path is cancelled from the echo before the next search, so
    a weak path is not buried under the strong path's correlation sidelobes.
    Later peaks may not lie within one delay cell of an earlier one. A peak is
    confident when it clears both the noise threshold (sigma_z2 given) and
    the dynamic-range floor below the strongest peak. Every peak carries the
    echo with the other confident paths removed, ready for separate_path.

    Returns:
        MatchedFilterResult in detection order, strongest first; flags hold
        "missing_peaks" when fewer than n_peaks maxima exist and
        "low_confidence" when any peak is weak
    """
    delay_grid = np.asarray(delay_grid, dtype=int)
    doppler_grid = np.asarray(doppler_grid, dtype=float)
    ns, nr, L = S.shape[0], R.shape[0], S.shape[1]
    noise_threshold = 0.0 if sigma_z2 is None else detection_threshold(sigma_z2, L, nr, ns, detection_sigmas)

    residual = R
    surface = first_surface = matched_filter_surface(R, S, delay_grid, doppler_grid)
    threshold = noise_threshold
    cells: List[Tuple[int, float, float]] = []
    contributions: List[np.ndarray] = []
    while len(cells) < n_peaks:
        taken = np.array([c[0] for c in cells], dtype=int)
        blocked = np.array([np.any(np.abs(taken - l) <= 1) for l in delay_grid], dtype=bool)
        cell = _strongest_cell(surface, blocked)
        if cell is None:
            break
        power = float(surface[cell])
        if not cells:
            threshold = max(noise_threshold, power * 10.0 ** (-dynamic_range_db / 10.0))
        delay, doppler = int(delay_grid[cell[0]]), float(doppler_grid[cell[1]])
        cells.append((delay, doppler, power))
        contributions.append(path_contribution(residual, S, delay, doppler))
        if len(cells) < n_peaks:
            residual = residual - contributions[-1]
            surface = matched_filter_surface(residual, S, delay_grid, doppler_grid)

    # each confident path is handed the echo with every other confident path removed
    confident = [power > threshold for _, _, power in cells]
    total = sum((c for c, ok in zip(contributions, confident) if ok), np.zeros_like(R, dtype=complex))
    peaks = [
        Peak(delay, doppler, power, ok, echo=R - (total - contribution) if ok else R - total)
        for (delay, doppler, power), ok, contribution in zip(cells, confident, contributions)
    ]

    flags = []
    if len(peaks) < n_peaks:
        flags.append("missing_peaks")
    if any(not p.confident for p in peaks):
        flags.append("low_confidence")
    return MatchedFilterResult(peaks=peaks, surface=first_surface, threshold=threshold, flags=flags)


def separate_path(R: np.ndarray, S: np.ndarray, delay_index: int, doppler_index: float) -> np.ndarray:
    """R_i = R Lambda_k^H S_l^H, an nr x ns block"""
    L = S.shape[1]
    window = R[:, delay_index:delay_index + L]
    if window.shape[1] != L:
        raise ValueError(f"delay index {delay_index} leaves fewer than {L} samples in the echo")
    return window @ (S * doppler_phases(doppler_index, L)[np.newaxis, :]).conj().T


def associate_peaks(peaks: Sequence[Peak], predicted_delays: Sequence[int],
                    gate: int = 3) -> List[Optional[Peak]]:
    """
    Assign confident peaks to paths by nearest predicted delay index.

    Strongest peaks choose first; each path takes at most one peak.
    """
    assigned: List[Optional[Peak]] = [None] * len(predicted_delays)
    for peak in peaks:
        if not peak.confident:
            continue
        distance = [
            abs(peak.delay_index - l) if assigned[i] is None else np.inf
            for i, l in enumerate(predicted_delays)
        ]
        best = int(np.argmin(distance)) if distance else -1
        if best >= 0 and distance[best] <= gate:
            assigned[best] = peak
    return assigned
