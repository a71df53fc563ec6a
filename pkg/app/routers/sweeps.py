import json
import uuid
from typing import Any, Dict, List, Union

from fastapi import APIRouter, Depends, HTTPException
from pydantic import BaseModel, Field
from sqlalchemy.orm import Session

from app.db import get_db
from app.harness.config_file import ConfigError, apply_overrides
from app.harness.experiment import sweep
from app.harness.outputs import json_ready
from app.models import SweepRun
from app.schemas import SimConfig
from app.settings import Settings, get_settings

router = APIRouter(prefix="/api/sweeps", tags=["sweeps"])


class SweepRequest(BaseModel):
    """Request model for a one-parameter sweep"""
    param: str = Field(description="Dotted numeric config key, e.g. tpm.c_pi")
    values: List[Union[float, str]] = Field(min_length=1)
    overrides: Dict[str, Any] = Field(default_factory=dict)
    write_outputs: bool = True


@router.post("/run")
def run(
    request: SweepRequest,
    db: Session = Depends(get_db),
    settings: Settings = Depends(get_settings),
):
    """
    Run one experiment per value of request.param.

    Returns:
        Stored sweep id and the summary table (one row per value and scheme)
    """
    output_dir = settings.output_dir / "sweeps" / uuid.uuid4().hex if request.write_outputs else None
    try:
        config = apply_overrides(SimConfig(), request.overrides)
        result = sweep(config, request.param, request.values, output_dir, db)
    except ConfigError as e:
        raise HTTPException(status_code=400, detail=str(e))
    except Exception as e:
        raise HTTPException(
            status_code=500,
            detail=f"Sweep failed: {str(e)}"
        )

    return {
        "sweep_id": result.sweep_id,
        "output_dir": str(output_dir) if output_dir is not None else None,
        "rows": [json_ready(row) for row in result.rows],
    }


@router.get("/{sweep_id}")
async def get_sweep(sweep_id: int, db: Session = Depends(get_db)):
    """
    Fetch a stored sweep table.
    """
    run = db.query(SweepRun).filter(SweepRun.id == sweep_id).first()
    if not run:
        raise HTTPException(
            status_code=404,
            detail=f"Sweep with id {sweep_id} not found"
        )

    return {
        "sweep_id": run.id,
        "param": run.param,
        "values": json.loads(run.values_json),
        "output_dir": run.output_dir,
        "created_at": run.created_at.isoformat() if run.created_at else None,
        "rows": json.loads(run.table_json),
    }
