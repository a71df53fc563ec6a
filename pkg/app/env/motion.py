"""
Ground-truth vehicle motion.
"""
from typing import List, Optional, Sequence

import numpy as np

from app.env.scene import VehicleState


def evolve_state(state: VehicleState, dt: float, noise: Optional[Sequence[float]] = None,
                 accel: float = 0.0) -> VehicleState:
    """
    Constant-velocity step, optionally with an unmodeled acceleration.

    Args:
        state: Current state
        dt: Step length (s), dt = 0 is the identity for zero noise
        noise: Additive (w_qx, w_qy, w_v), None means zero
        accel: Longitudinal acceleration (m/s^2)
    """
    if dt < 0:
        raise ValueError(f"dt must be non-negative, got {dt}")
    w = np.zeros(3) if noise is None else np.asarray(noise, dtype=float)
    return VehicleState(
        qx=state.qx + dt * state.v + 0.5 * accel * dt ** 2 + w[0],
        qy=state.qy + w[1],
        v=state.v + accel * dt + w[2],
    )


def simulate_trajectory(initial: VehicleState, n_slots: int, dt: float, sigma: Sequence[float],
                        rng: np.random.Generator, accel: float = 0.0) -> List[VehicleState]:
    """Slot 0 is the initial state; every later slot is one noisy evolve_state step"""
    noise = rng.standard_normal((max(n_slots - 1, 0), 3)) * np.asarray(sigma, dtype=float)
    states = [initial]
    for w in noise:
        states.append(evolve_state(states[-1], dt, w, accel=accel))
    return states
