"""
Beam selection and predictive beamforming plans.
"""
from dataclasses import dataclass, field
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np

from app.bdomain.tpm import AngularBelief, AngularGrid, hard_predict
from app.beamform.allocation import AllocationProblem, allocate_power, allocation_coeffs
from app.signal.waveform import Beamformer, steering_matrix

BeamformingMode = Literal["none", "equal", "optimized"]


@dataclass(frozen=True)
class BeamSelection:
    A: np.ndarray
    path_ids: Tuple[int, ...]
    angles: Tuple[float, ...]


@dataclass(frozen=True)
class BeamformingPlan:
    beamformer: Beamformer
    mode: str
    angles: Tuple[float, ...]
    path_ids: Tuple[int, ...]
    t_star: float = 0.0
    flags: List[str] = field(default_factory=list)

    @property
    def gamma(self) -> np.ndarray:
        return self.beamformer.gamma

    @property
    def F(self) -> np.ndarray:
        return self.beamformer.F


def select_beams(predicted: Sequence[Tuple[float, float]], ns: int, nt: int,
                 path_ids: Optional[Sequence[int]] = None) -> BeamSelection:
    """
    Pick beam directions from per-path (angle, |beta|) predictions.

    ns < P keeps the ns strongest paths (ties toward the lower path id);
    ns >= P uses every path and repeats the strongest to fill the columns.
    Columns follow path-id order.
    """
    if not predicted:
        raise ValueError("at least one predicted path is required")
    ids = list(path_ids) if path_ids is not None else list(range(1, len(predicted) + 1))
    # stable sort on -|beta| keeps the lower path id first among equal gains
    by_strength = sorted(range(len(predicted)), key=lambda i: -abs(predicted[i][1]))
    if ns < len(predicted):
        chosen = sorted(by_strength[:ns])
    else:
        chosen = list(range(len(predicted))) + [by_strength[0]] * (ns - len(predicted))
    angles = tuple(float(predicted[i][0]) for i in chosen)
    return BeamSelection(
        A=steering_matrix(angles, nt),
        path_ids=tuple(ids[i] for i in chosen),
        angles=angles,
    )


def build_plan(angles: Sequence[float], gains: Sequence[float], ns: int, nt: int, nr: int,
               budget: float, mode: BeamformingMode = "optimized",
               path_ids: Optional[Sequence[int]] = None) -> BeamformingPlan:
    """
    Beamformer for the next slot from hard-predicted angles and gain magnitudes.

    Args:
        angles: Hard-predicted AoA per tracked path
        gains: |beta_i| per path
        ns, nt, nr: Streams and array sizes
        budget: Per-beam power budget P_t / nt
        mode: none (one beam, full budget), equal or optimized
    """
    predicted = list(zip(angles, np.abs(gains)))
    ids = list(path_ids) if path_ids is not None else list(range(1, len(predicted) + 1))

    if mode == "none":
        strongest = max(range(len(predicted)), key=lambda i: (predicted[i][1], -i))
        beamformer = Beamformer.single_beam(predicted[strongest][0], nt, ns, budget)
        return BeamformingPlan(beamformer, mode, (float(predicted[strongest][0]),) * ns, (ids[strongest],) * ns)

    selection = select_beams(predicted, ns, nt, ids)
    if mode == "equal":
        gamma = np.full(ns, budget / ns)
        return BeamformingPlan(Beamformer(selection.A, gamma), mode, selection.angles, selection.path_ids)

    coeffs = allocation_coeffs(selection.A, angles, nr)
    amplitudes = np.abs(np.asarray(gains, dtype=float)) * np.abs(np.sin(np.asarray(angles, dtype=float)))
    result = allocate_power(AllocationProblem(coeffs, amplitudes, budget))
    return BeamformingPlan(
        Beamformer(selection.A, result.gamma), mode, selection.angles, selection.path_ids,
        t_star=result.t, flags=list(result.flags),
    )


def plan_from_beliefs(beliefs: Sequence[AngularBelief], grid: AngularGrid, gains: Sequence[float],
                      ns: int, nt: int, nr: int, budget: float,
                      mode: BeamformingMode = "optimized") -> BeamformingPlan:
    """build_plan on the hard predictions of per-path beliefs"""
    return build_plan([hard_predict(b, grid) for b in beliefs], gains, ns, nt, nr, budget, mode)
