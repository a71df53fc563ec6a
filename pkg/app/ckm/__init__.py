from app.ckm.knowledge_map import (
    ChannelKnowledgeMap,
    CkmSample,
    PathTuple,
    build_ckm,
    g2_measure,
    jacobian_g2,
    query_ckm,
    road_strip_locations,
)

__all__ = [
    "ChannelKnowledgeMap",
    "CkmSample",
    "PathTuple",
    "build_ckm",
    "g2_measure",
    "jacobian_g2",
    "query_ckm",
    "road_strip_locations",
]
