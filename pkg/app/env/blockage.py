"""
Random and static path blockage.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from app.schemas import BlockageConfig


@dataclass(frozen=True)
class BlockageDraw:
    alive: Tuple[bool, ...]
    static_block: bool


@dataclass(frozen=True)
class BlockageSchedule:
    """Pre-drawn blockage for one run: alive[slot, path_index], static_block[slot]"""
    alive: np.ndarray
    static_block: np.ndarray


def in_static_window(cfg: BlockageConfig, slot: int) -> bool:
    if cfg.static_window is None:
        return False
    start, end = cfg.static_window
    return start <= slot <= end


def blockage_step(cfg: BlockageConfig, slot: int, rng: np.random.Generator,
                  n_paths: int = 2) -> BlockageDraw:
    """
    Draw the alive flags of one slot.

    One uniform per path is consumed in path-id order, also inside the static
    window, so streams stay aligned across slots.
    """
    if slot < 0:
        raise ValueError(f"slot must be non-negative, got {slot}")
    u = rng.random(n_paths)
    static = in_static_window(cfg, slot)
    los_alive = bool(u[0] >= cfg.p_blk) and not static
    nlos_alive = [bool(x >= cfg.nlos_blockage_probability) for x in u[1:]]
    return BlockageDraw(alive=(los_alive, *nlos_alive), static_block=static)


def blockage_schedule(cfg: BlockageConfig, n_slots: int, n_paths: int,
                      rng: np.random.Generator) -> BlockageSchedule:
    draws = [blockage_step(cfg, slot, rng, n_paths) for slot in range(n_slots)]
    return BlockageSchedule(
        alive=np.array([d.alive for d in draws], dtype=bool).reshape(n_slots, n_paths),
        static_block=np.array([d.static_block for d in draws], dtype=bool),
    )
