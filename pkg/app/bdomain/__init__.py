from app.bdomain.tpm import (
    AngularBelief,
    AngularGrid,
    TransitionKind,
    TransitionSpec,
    band_halfwidth,
    hard_predict,
    propagate_belief,
    support,
    tpm_ckm_row,
    tpm_temporal_row_weights,
)
from app.bdomain.tracker import MapUpdate, map_update

__all__ = [
    "AngularBelief",
    "AngularGrid",
    "MapUpdate",
    "TransitionKind",
    "TransitionSpec",
    "band_halfwidth",
    "hard_predict",
    "map_update",
    "propagate_belief",
    "support",
    "tpm_ckm_row",
    "tpm_temporal_row_weights",
]
