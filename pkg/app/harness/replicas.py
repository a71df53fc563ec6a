"""
Monte Carlo replicas: one scenario per run, every scheme on the same scenario.
"""
import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Dict, List, Optional

from app.ckm.knowledge_map import ChannelKnowledgeMap, build_ckm, road_strip_locations
from app.harness.scenario import draw_scenario
from app.harness.tracking import init_context, run_baseline_slot, run_slot
from app.schemas import SimConfig, SlotRecord

logger = logging.getLogger(__name__)

# Flags worth a warning when they show up in a run
WARN_FLAGS = ("regularized", "degenerate_allocation", "misaligned", "low_confidence", "diverged", "gated")


def build_map(config: SimConfig) -> ChannelKnowledgeMap:
    """CKM over the configured road strip"""
    return build_ckm(
        config.scene, road_strip_locations(config.ckm), k=config.ckm.k,
        idw_power=config.ckm.idw_power, t_p=config.timing.t_p,
    )


def run_replica(config: SimConfig, ckm: Optional[ChannelKnowledgeMap], run_id: int) -> Dict[str, List[SlotRecord]]:
    scenario = draw_scenario(config, run_id)
    records: Dict[str, List[SlotRecord]] = {}
    for scheme in config.schemes:
        ctx = init_context(config, scenario, scheme, ckm)
        step = run_slot if scheme == "proposed" else run_baseline_slot
        records[scheme] = [step(ctx) for _ in range(config.n_slots)]

        counts = Counter(f.split(":")[0] for r in records[scheme] for f in r.flags)
        flagged = {name: counts[name] for name in WARN_FLAGS if counts[name]}
        if flagged:
            logger.warning("run %d %s flagged slots: %s", run_id, scheme, flagged)
    logger.info("Finished run %d", run_id)
    return records


def run_replicas(config: SimConfig, ckm: Optional[ChannelKnowledgeMap]) -> List[Dict[str, List[SlotRecord]]]:
    """All mc.runs replicas in run_id order, in a process pool when mc.workers > 1"""
    run_ids = range(config.mc.runs)
    worker = partial(run_replica, config, ckm)
    if config.mc.workers == 1:
        return [worker(run_id) for run_id in run_ids]
    with ProcessPoolExecutor(max_workers=config.mc.workers) as pool:
        return list(pool.map(worker, run_ids))
