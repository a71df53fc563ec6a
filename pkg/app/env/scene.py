"""
Scene geometry and ground-truth path parameters.

The RSU sits at scene.rsu_position, the vehicle drives along the x-axis and
every reflector is an axis-parallel mirror line y = const beyond the road.
"""
from dataclasses import dataclass, replace
from typing import List

import numpy as np

from app.schemas import Scene

# Propagation speed used by every delay/Doppler formula (m/s)
SPEED_OF_LIGHT = 3.0e8


@dataclass(frozen=True)
class VehicleState:
    """C-domain state: position (m) and signed speed along x (m/s)"""
    qx: float
    qy: float
    v: float

    def __post_init__(self):
        if not np.all(np.isfinite([self.qx, self.qy, self.v])):
            raise ValueError(f"VehicleState must be finite, got ({self.qx}, {self.qy}, {self.v})")
        if self.qy <= 0.0:
            raise ValueError(f"VehicleState qy must be positive, got {self.qy}")

    @classmethod
    def from_array(cls, values: np.ndarray) -> "VehicleState":
        qx, qy, v = (float(x) for x in values)
        return cls(qx, qy, v)

    def as_array(self) -> np.ndarray:
        return np.array([self.qx, self.qy, self.v])

    @property
    def position(self) -> np.ndarray:
        return np.array([self.qx, self.qy])


@dataclass(frozen=True)
class PathParams:
    path_id: int
    gain: complex
    amp_loss: float
    aoa: float
    delay: float
    doppler: float
    delay_index: int
    doppler_index: float
    alive: bool = True

    def with_alive(self, alive: bool) -> "PathParams":
        return replace(self, alive=bool(alive))


def wavelength(scene: Scene) -> float:
    return SPEED_OF_LIGHT / scene.carrier_freq


def los_parameters(qx: float, qy: float, v: float, carrier_freq: float) -> np.ndarray:
    """
    Noiseless LoS measurement triple [tau, mu, cos(theta)] for an RSU-relative position.

    The Doppler term follows the printed measurement model and scales with qy.
    """
    r = np.hypot(qx, qy)
    tau = 2.0 * r / SPEED_OF_LIGHT
    mu = -2.0 * v * qy * carrier_freq / (SPEED_OF_LIGHT * r)
    return np.array([tau, mu, qx / r])


def _amplitude(scene: Scene, one_way: float, loss: float) -> float:
    return loss * scene.rcs_gain * wavelength(scene) / (4.0 * np.pi * 2.0 * one_way)


def _make_path(scene: Scene, path_id: int, one_way: float, aoa: float,
               doppler: float, loss: float, t_p: float) -> PathParams:
    alpha = _amplitude(scene, one_way, loss)
    tau = 2.0 * one_way / SPEED_OF_LIGHT
    # carrier phase of the round trip; only |beta| matters to the tracker
    gain = scene.reflection_coeff * alpha ** 2 * np.exp(-2j * np.pi * scene.carrier_freq * tau)
    return PathParams(
        path_id=path_id,
        gain=complex(gain),
        amp_loss=alpha,
        aoa=float(aoa),
        delay=tau,
        doppler=float(doppler),
        delay_index=int(round(tau / t_p)),
        doppler_index=float(doppler * t_p),
    )


def ground_truth_paths(scene: Scene, state: VehicleState, t_p: float = 1e-8) -> List[PathParams]:
    """
    Evaluate every propagation path of the scene at a vehicle state.

    Args:
        scene: Scene geometry
        state: Vehicle state (absolute coordinates)
        t_p: Sample interval used for the delay/Doppler indices

    Returns:
        1 + len(scene.reflectors) paths sorted by path_id (1 = LoS)

    Raises:
        ValueError: If the geometry is degenerate
    """
    rsu = np.asarray(scene.rsu_position, dtype=float)
    rel = state.position - rsu
    if rel[1] <= 0.0:
        raise ValueError(f"vehicle must lie beyond the RSU in y, got relative qy={rel[1]}")

    tau, mu, cos_theta = los_parameters(rel[0], rel[1], state.v, scene.carrier_freq)
    r = np.hypot(rel[0], rel[1])
    paths = [_make_path(scene, 1, r, np.arccos(np.clip(cos_theta, -1.0, 1.0)), mu, 1.0, t_p)]

    for j, reflector in enumerate(scene.reflectors, start=2):
        if reflector.y <= state.qy:
            raise ValueError(f"reflector y={reflector.y} must lie beyond the vehicle (qy={state.qy})")
        mirror = np.array([state.qx, 2.0 * reflector.y - state.qy]) - rsu
        d = np.hypot(mirror[0], mirror[1])
        # d(d)/dt with the mirror image moving at (v, 0)
        doppler = -2.0 * scene.carrier_freq / SPEED_OF_LIGHT * mirror[0] * state.v / d
        aoa = np.arctan2(mirror[1], mirror[0])
        paths.append(_make_path(scene, j, d, aoa, doppler, reflector.loss, t_p))
    return paths
