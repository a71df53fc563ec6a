"""
Experiment entry points: one configuration, or a sweep over one numeric key.
"""
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Union

from sqlalchemy.orm import Session

from app.harness.config_file import numeric_override
from app.harness.outputs import json_ready, write_json, write_sweep_csv
from app.models import SweepRun
from app.pipeline.graph import run_pipeline
from app.schemas import ExperimentSummary, SimConfig, SlotRecord, SweepRow

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    records: List[SlotRecord]
    summary: ExperimentSummary
    slots_csv: Optional[Path] = None
    summary_json: Optional[Path] = None
    experiment_id: Optional[int] = None


def run_experiment(config: SimConfig, output_dir: Optional[Union[str, Path]] = None,
                   db: Optional[Session] = None) -> ExperimentResult:
    """
    Run mc.runs replicas of every configured scheme and aggregate them.

    Args:
        config: Validated configuration
        output_dir: Where slots.csv and summary.json go; None keeps results in memory
        db: Catalog session; None skips storage

    Returns:
        ExperimentResult with records ordered by run, scheme and slot
    """
    logger.info("Starting experiment: scheme=%s runs=%d slots=%d", config.scheme, config.mc.runs, config.n_slots)
    state = run_pipeline(config, output_dir, db)
    records = [r for rep in state["replicas"] for scheme in config.schemes for r in rep[scheme]]
    result = ExperimentResult(
        records=records,
        summary=state["summary"],
        slots_csv=Path(state["slots_csv"]) if state.get("slots_csv") else None,
        summary_json=Path(state["summary_json"]) if state.get("summary_json") else None,
        experiment_id=state.get("experiment_id"),
    )
    logger.info("Finished experiment with %d slot records", len(records))
    return result


@dataclass
class SweepResult:
    rows: List[SweepRow]
    sweep_csv: Optional[Path] = None
    sweep_id: Optional[int] = None


def _value_label(value: float) -> str:
    return f"{value:g}"


def sweep(config: SimConfig, param: str, values: Sequence[Union[str, float]],
          output_dir: Optional[Union[str, Path]] = None, db: Optional[Session] = None) -> SweepResult:
    """
    run_experiment once per value of a numeric config key, one row per value and scheme.

    Raises:
        ConfigError: If the key is unknown or not numeric
    """
    if not values:
        raise ValueError("sweep needs at least one value")
    configs = [numeric_override(config, param, value) for value in values]
    out = Path(output_dir) if output_dir is not None else None
    rows: List[SweepRow] = []
    for value, cfg in zip(values, configs):
        sub_dir = out / f"{param}={_value_label(float(value))}" if out is not None else None
        result = run_experiment(cfg, sub_dir)
        for scheme, summary in result.summary.schemes.items():
            rows.append(SweepRow(
                param=param,
                value=float(value),
                scheme=scheme,
                mean_aoa_error=summary.mean_aoa_error,
                mean_rmse=summary.mean_rmse,
                final_rmse=summary.final_rmse,
            ))

    result = SweepResult(rows=rows)
    if out is not None:
        result.sweep_csv = write_sweep_csv(rows, out / "sweep.csv")
        write_json([json_ready(row) for row in rows], out / "sweep.json")
    if db is not None:
        run = SweepRun(
            param=param,
            values_json=json.dumps([float(v) for v in values]),
            table_json=json.dumps([json_ready(row) for row in rows], sort_keys=True),
            output_dir=str(out) if out is not None else None,
        )
        db.add(run)
        db.commit()
        db.refresh(run)
        result.sweep_id = run.id
        logger.info("Stored sweep %d", run.id)
    return result
