from app.cdomain.ekf import (
    CState,
    EkfUpdate,
    MeasurementModel,
    NoiseModel,
    ckm_model,
    ekf_update,
    g1,
    initial_state,
    jacobian_g1,
    los_model,
    make_psd,
    predict,
    transition_matrix,
)

__all__ = [
    "CState",
    "EkfUpdate",
    "MeasurementModel",
    "NoiseModel",
    "ckm_model",
    "ekf_update",
    "g1",
    "initial_state",
    "jacobian_g1",
    "los_model",
    "make_psd",
    "predict",
    "transition_matrix",
]
