from app.env.blockage import BlockageDraw, BlockageSchedule, blockage_schedule, blockage_step, in_static_window
from app.env.motion import evolve_state, simulate_trajectory
from app.env.scene import (
    SPEED_OF_LIGHT,
    PathParams,
    VehicleState,
    ground_truth_paths,
    los_parameters,
    wavelength,
)

__all__ = [
    "SPEED_OF_LIGHT",
    "BlockageDraw",
    "BlockageSchedule",
    "PathParams",
    "VehicleState",
    "blockage_schedule",
    "blockage_step",
    "evolve_state",
    "ground_truth_paths",
    "in_static_window",
    "los_parameters",
    "simulate_trajectory",
    "wavelength",
]
