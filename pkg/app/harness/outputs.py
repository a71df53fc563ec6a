"""
slots.csv and summary.json writers.

Floats are written with repr so a given config and seed always produce the
same bytes.
"""
import csv
import json
import logging
from pathlib import Path
from typing import Iterable, List, Sequence

from pydantic import BaseModel

from app.schemas import ExperimentSummary, SlotRecord, SweepRow

logger = logging.getLogger(__name__)

STATE_COLUMNS = [
    "run_id", "slot", "scheme",
    "true_qx", "true_qy", "true_v", "est_qx", "est_qy", "est_v",
    "position_error", "los_present", "regime",
]
PATH_COLUMNS = ["alive", "detected", "kind", "true_aoa_deg", "est_aoa_deg", "aoa_error_deg", "misaligned"]
PLAN_COLUMNS = ["plan_mode", "plan_angles_deg", "plan_gamma"]
DIAGNOSTIC_COLUMNS = ["prior_entropy", "posterior_entropy", "innovation", "nis", "flags"]


def slots_header(n_paths: int) -> List[str]:
    per_path = [f"{name}_{i}" for i in range(1, n_paths + 1) for name in PATH_COLUMNS]
    return STATE_COLUMNS + per_path + PLAN_COLUMNS + DIAGNOSTIC_COLUMNS


def _cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _joined(values: Sequence) -> str:
    return ";".join(_cell(v) for v in values)


def record_row(record: SlotRecord) -> List[str]:
    row = [_cell(getattr(record, name)) for name in STATE_COLUMNS]
    for i in range(len(record.alive)):
        row.extend(_cell(getattr(record, name)[i]) for name in PATH_COLUMNS)
    row.extend([record.plan_mode, _joined(record.plan_angles_deg), _joined(record.plan_gamma)])
    row.extend([
        _joined(record.prior_entropy), _joined(record.posterior_entropy), _joined(record.innovation),
        _cell(record.nis), _joined(record.flags),
    ])
    return row


def write_slots_csv(records: Iterable[SlotRecord], path: Path, n_paths: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(slots_header(n_paths))
        for record in records:
            writer.writerow(record_row(record))
    logger.info("Wrote %s", path)
    return path


def json_ready(model: BaseModel):
    """Plain JSON data of a model; NaN and inf become null"""
    return json.loads(model.model_dump_json())


def write_json(payload, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    logger.info("Wrote %s", path)
    return path


def write_summary_json(summary: ExperimentSummary, path: Path) -> Path:
    return write_json(json_ready(summary), path)


def write_sweep_csv(rows: Sequence[SweepRow], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    paths = sorted({p for row in rows for p in row.mean_aoa_error})
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["param", "value", "scheme"] + [f"mean_aoa_error_{p}" for p in paths] + ["mean_rmse", "final_rmse"])
        for row in rows:
            writer.writerow(
                [row.param, repr(row.value), row.scheme]
                + [repr(row.mean_aoa_error[p]) if p in row.mean_aoa_error else "" for p in paths]
                + [repr(row.mean_rmse), repr(row.final_rmse)]
            )
    logger.info("Wrote %s", path)
    return path
