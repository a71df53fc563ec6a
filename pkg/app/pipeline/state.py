"""
LangGraph state definition for the experiment pipeline.
"""
from typing import Dict, List, Optional, TypedDict

from app.ckm.knowledge_map import ChannelKnowledgeMap
from app.schemas import ExperimentSummary, SimConfig, SlotRecord


class ExperimentState(TypedDict):
    """
    State that flows through the LangGraph pipeline.
    Each node reads from and writes to this state.
    """
    # Input
    config: SimConfig
    output_dir: Optional[str]

    # Intermediate data
    ckm: Optional[ChannelKnowledgeMap]
    replicas: Optional[List[Dict[str, List[SlotRecord]]]]

    # Output
    summary: Optional[ExperimentSummary]
    slots_csv: Optional[str]
    summary_json: Optional[str]

    # Metadata
    experiment_id: Optional[int]
    error: Optional[str]
