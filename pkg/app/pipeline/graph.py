"""
LangGraph workflow for experiments.
Orchestrates map construction, Monte Carlo replicas, aggregation, outputs and storage.
"""
import logging
from pathlib import Path
from typing import Optional, Union

from langgraph.graph import END, StateGraph
from sqlalchemy.orm import Session

from app.pipeline.nodes import (
    aggregate_node,
    build_map_node,
    run_replicas_node,
    store_result_node,
    write_outputs_node,
)
from app.pipeline.state import ExperimentState
from app.schemas import SimConfig

logger = logging.getLogger(__name__)


class ExperimentError(RuntimeError):
    """A pipeline node failed; the message is the node's error"""


def create_experiment_graph(db: Optional[Session] = None):
    """
    Create the LangGraph pipeline.

    Workflow:
    1. Build CKM
    2. Run replicas
    3. Aggregate
    4. Write outputs
    5. Store result

    Args:
        db: Database session, None skips storage

    Returns:
        Compiled LangGraph
    """
    workflow = StateGraph(ExperimentState)

    workflow.add_node("build_map", build_map_node)
    workflow.add_node("run_replicas", run_replicas_node)
    workflow.add_node("aggregate", aggregate_node)
    workflow.add_node("write_outputs", write_outputs_node)
    workflow.add_node("store_result", lambda state: store_result_node(state, db))

    workflow.set_entry_point("build_map")
    workflow.add_edge("build_map", "run_replicas")
    workflow.add_edge("run_replicas", "aggregate")
    workflow.add_edge("aggregate", "write_outputs")
    workflow.add_edge("write_outputs", "store_result")
    workflow.add_edge("store_result", END)

    return workflow.compile()


def run_pipeline(config: SimConfig, output_dir: Optional[Union[str, Path]] = None,
                 db: Optional[Session] = None) -> ExperimentState:
    """
    Run the experiment pipeline.

    Raises:
        ExperimentError: If any node fails
    """
    initial_state: ExperimentState = {
        "config": config,
        "output_dir": str(output_dir) if output_dir is not None else None,
        "ckm": None,
        "replicas": None,
        "summary": None,
        "slots_csv": None,
        "summary_json": None,
        "experiment_id": None,
        "error": None,
    }

    final_state = create_experiment_graph(db).invoke(initial_state)
    if final_state.get("error"):
        logger.error("Experiment failed: %s", final_state["error"])
        raise ExperimentError(final_state["error"])
    return final_state
