from app.signal.echo import EchoFrame, synthesize_echo
from app.signal.likelihood import gain_estimate, profile_loglik, profile_loglik_grid
from app.signal.matched_filter import (
    MatchedFilterResult,
    Peak,
    associate_peaks,
    cancel_path,
    detection_threshold,
    matched_filter_search,
    noise_floor,
    separate_path,
)
from app.signal.waveform import Beamformer, TxFrame, complex_normal, draw_frame, steering_matrix, steering_vector

__all__ = [
    "Beamformer",
    "EchoFrame",
    "MatchedFilterResult",
    "Peak",
    "TxFrame",
    "associate_peaks",
    "cancel_path",
    "complex_normal",
    "detection_threshold",
    "draw_frame",
    "gain_estimate",
    "matched_filter_search",
    "noise_floor",
    "profile_loglik",
    "profile_loglik_grid",
    "separate_path",
    "steering_matrix",
    "steering_vector",
    "synthesize_echo",
]
