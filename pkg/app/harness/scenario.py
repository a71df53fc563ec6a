"""
Per-run randomness drawn up front so every scheme sees the same world.

Each purpose gets its own child seed derived from (mc.seed, run_id, purpose),
so the proposed tracker and the baseline consume identical trajectories,
blockage, frames and noise.
"""
from dataclasses import dataclass
from typing import List

import numpy as np

from app.bdomain.tpm import TransitionKind
from app.env.blockage import BlockageSchedule, blockage_schedule
from app.env.motion import simulate_trajectory
from app.env.scene import VehicleState
from app.schemas import SimConfig

STREAMS = ("trajectory", "blockage", "init", "frames", "noise", "measurement")


def child_seed(mc_seed: int, run_id: int, purpose: str) -> np.random.SeedSequence:
    return np.random.SeedSequence([mc_seed, run_id, STREAMS.index(purpose)])


@dataclass(frozen=True)
class Scenario:
    run_id: int
    mc_seed: int
    truth: List[VehicleState]
    blockage: BlockageSchedule

    def rng(self, purpose: str) -> np.random.Generator:
        """Fresh generator for a purpose; two calls replay the same draws"""
        return np.random.default_rng(child_seed(self.mc_seed, self.run_id, purpose))

    @property
    def n_slots(self) -> int:
        return len(self.truth)

    def transition_kind(self, slot: int, path_index: int) -> TransitionKind:
        """
        Oracle transition kind of a path into a slot.

        A path alive again right after the static window is predictable; alive
        again after a random block is unpredictable; anything else is stationary.
        """
        if slot == 0:
            return TransitionKind.UNPREDICTABLE
        alive = self.blockage.alive
        if alive[slot, path_index] and not alive[slot - 1, path_index]:
            if path_index == 0 and self.blockage.static_block[slot - 1]:
                return TransitionKind.PREDICTABLE
            return TransitionKind.UNPREDICTABLE
        return TransitionKind.STATIONARY


def draw_scenario(config: SimConfig, run_id: int) -> Scenario:
    seed = config.mc.seed
    traj = config.trajectory
    truth = simulate_trajectory(
        VehicleState(*traj.initial),
        config.n_slots,
        config.timing.dt,
        traj.sigma,
        np.random.default_rng(child_seed(seed, run_id, "trajectory")),
        accel=traj.accel,
    )
    blockage = blockage_schedule(
        config.blockage, config.n_slots, config.scene.n_paths,
        np.random.default_rng(child_seed(seed, run_id, "blockage")),
    )
    return Scenario(run_id=run_id, mc_seed=seed, truth=truth, blockage=blockage)
