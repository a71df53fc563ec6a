"""
LangGraph nodes for the experiment pipeline.
Each node performs one step of the workflow and records failures in state["error"].
"""
import json
import logging
from pathlib import Path
from typing import Optional

from sqlalchemy.orm import Session

from app.harness.metrics import summarize
from app.harness.outputs import json_ready, write_slots_csv, write_summary_json
from app.harness.replicas import build_map, run_replicas
from app.models import ExperimentRun
from app.pipeline.state import ExperimentState
from app.schemas import ExperimentSummary

logger = logging.getLogger(__name__)


def build_map_node(state: ExperimentState) -> ExperimentState:
    """
    Node 1: Build the channel knowledge map (only the proposed scheme uses it)
    """
    if state.get("error"):
        return state
    try:
        config = state["config"]
        state["ckm"] = build_map(config) if "proposed" in config.schemes else None
        return state
    except Exception as e:
        state["error"] = f"Error building channel knowledge map: {str(e)}"
        return state


def run_replicas_node(state: ExperimentState) -> ExperimentState:
    """
    Node 2: Run every Monte Carlo replica
    """
    if state.get("error"):
        return state
    try:
        config = state["config"]
        logger.info("Running %d runs x %d slots for %s", config.mc.runs, config.n_slots, ", ".join(config.schemes))
        state["replicas"] = run_replicas(config, state["ckm"])
        return state
    except Exception as e:
        state["error"] = f"Error running replicas: {str(e)}"
        return state


def aggregate_node(state: ExperimentState) -> ExperimentState:
    """
    Node 3: Aggregate RMSE, AoA error statistics and flags per scheme
    """
    if state.get("error"):
        return state
    try:
        config = state["config"]
        state["summary"] = ExperimentSummary(
            config=config.model_dump(mode="json"),
            n_runs=config.mc.runs,
            n_slots=config.n_slots,
            schemes=summarize(state["replicas"], config),
        )
        return state
    except Exception as e:
        state["error"] = f"Error aggregating results: {str(e)}"
        return state


def write_outputs_node(state: ExperimentState) -> ExperimentState:
    """
    Node 4: Write slots.csv and summary.json when an output directory is given
    """
    if state.get("error") or not state.get("output_dir"):
        return state
    try:
        out = Path(state["output_dir"])
        records = [r for rep in state["replicas"] for scheme in state["config"].schemes for r in rep[scheme]]
        state["slots_csv"] = str(write_slots_csv(records, out / "slots.csv", state["config"].scene.n_paths))
        state["summary_json"] = str(write_summary_json(state["summary"], out / "summary.json"))
        return state
    except Exception as e:
        state["error"] = f"Error writing outputs: {str(e)}"
        return state


def store_result_node(state: ExperimentState, db: Optional[Session]) -> ExperimentState:
    """
    Node 5: Store the experiment in the catalog when a session is given
    """
    if state.get("error") or db is None:
        return state
    try:
        config = state["config"]
        run = ExperimentRun(
            scheme=config.scheme,
            config_json=config.model_dump_json(),
            summary_json=json.dumps(json_ready(state["summary"]), sort_keys=True),
            output_dir=state.get("output_dir"),
        )
        db.add(run)
        db.commit()
        db.refresh(run)

        state["experiment_id"] = run.id
        return state
    except Exception as e:
        state["error"] = f"Error storing experiment: {str(e)}"
        return state
