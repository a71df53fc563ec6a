import json
import uuid
from typing import Any, Dict

from fastapi import APIRouter, Depends, HTTPException
from pydantic import BaseModel, Field
from sqlalchemy.orm import Session

from app.db import get_db
from app.harness.config_file import ConfigError, apply_overrides
from app.harness.experiment import run_experiment
from app.harness.outputs import json_ready
from app.models import ExperimentRun
from app.schemas import SimConfig
from app.settings import Settings, get_settings

router = APIRouter(prefix="/api/experiments", tags=["experiments"])


class ExperimentRequest(BaseModel):
    """Request model for running one experiment"""
    overrides: Dict[str, Any] = Field(default_factory=dict, description="Dotted config keys, e.g. mc.runs")
    write_outputs: bool = True


@router.post("/run")
def run(
    request: ExperimentRequest,
    db: Session = Depends(get_db),
    settings: Settings = Depends(get_settings),
):
    """
    Run an experiment on the default configuration with the given overrides.

    Args:
        request: ExperimentRequest with config overrides

    Returns:
        Stored experiment id, output directory and summary
    """
    try:
        config = apply_overrides(SimConfig(), request.overrides)
    except ConfigError as e:
        raise HTTPException(status_code=400, detail=str(e))

    output_dir = settings.output_dir / "experiments" / uuid.uuid4().hex if request.write_outputs else None
    try:
        result = run_experiment(config, output_dir, db)
    except Exception as e:
        raise HTTPException(
            status_code=500,
            detail=f"Experiment failed: {str(e)}"
        )

    return {
        "experiment_id": result.experiment_id,
        "output_dir": str(output_dir) if output_dir is not None else None,
        "summary": json_ready(result.summary),
    }


@router.get("/{experiment_id}")
async def get_experiment(experiment_id: int, db: Session = Depends(get_db)):
    """
    Fetch a stored experiment.
    """
    run = db.query(ExperimentRun).filter(ExperimentRun.id == experiment_id).first()
    if not run:
        raise HTTPException(
            status_code=404,
            detail=f"Experiment with id {experiment_id} not found"
        )

    return {
        "experiment_id": run.id,
        "scheme": run.scheme,
        "output_dir": run.output_dir,
        "created_at": run.created_at.isoformat() if run.created_at else None,
        "config": json.loads(run.config_json),
        "summary": json.loads(run.summary_json),
    }
