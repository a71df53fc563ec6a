"""
Extended Kalman filter over the vehicle state (qx, qy, v).

Two measurement regimes share one update: the analytic LoS model g1 and the
CKM table model g2 with a numerical Jacobian.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional, Sequence

import numpy as np

from app.ckm.knowledge_map import ChannelKnowledgeMap, g2_measure, jacobian_g2
from app.env.scene import SPEED_OF_LIGHT, VehicleState, los_parameters
from app.schemas import FilterConfig, Scene

logger = logging.getLogger(__name__)

# Positions closer than this to the RSU make g1 near-singular (m)
MIN_RANGE = 0.1
REGULARIZATION = 1e-12

Regime = Literal["los", "nlos"]


@dataclass(frozen=True)
class CState:
    mean: VehicleState
    cov: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return self.mean.as_array()


@dataclass(frozen=True)
class NoiseModel:
    q_alpha: np.ndarray
    q_beta1: np.ndarray

    def __post_init__(self):
        for name in ("q_alpha", "q_beta1"):
            diag = np.diag(getattr(self, name))
            if np.any(diag < 0):
                raise ValueError(f"{name} diagonal entries must be non-negative")

    @classmethod
    def from_config(cls, cfg: FilterConfig) -> "NoiseModel":
        return cls(
            q_alpha=np.diag(np.asarray(cfg.q_alpha, dtype=float)),
            q_beta1=np.diag([cfg.sigma_tau ** 2, cfg.sigma_mu ** 2, cfg.sigma_cos ** 2]),
        )

    def q_beta2(self, n_paths: int) -> np.ndarray:
        """Block layout [tau; mu; cos] reusing the LoS variances for every path"""
        return np.diag(np.repeat(np.diag(self.q_beta1), n_paths))


@dataclass(frozen=True)
class MeasurementModel:
    """g(state) and its Jacobian for one regime"""
    regime: Regime
    measure: Callable[[VehicleState], np.ndarray]
    jacobian: Callable[[VehicleState], np.ndarray]
    n_paths: int = 1


@dataclass(frozen=True)
class EkfUpdate:
    state: CState
    innovation: np.ndarray
    gain: np.ndarray
    nis: float
    flags: List[str] = field(default_factory=list)


def transition_matrix(dt: float) -> np.ndarray:
    """Constant-velocity E: qx += dt * v"""
    E = np.eye(3)
    E[0, 2] = dt
    return E


def make_psd(cov: np.ndarray) -> np.ndarray:
    """Symmetrize and clamp negative eigenvalues at zero"""
    sym = 0.5 * (cov + cov.T)
    eigval, eigvec = np.linalg.eigh(sym)
    if np.all(eigval >= 0):
        return sym
    clamped = (eigvec * np.maximum(eigval, 0.0)) @ eigvec.T
    return 0.5 * (clamped + clamped.T)


def initial_state(truth: VehicleState, init_var: float, rng: np.random.Generator) -> CState:
    """True initial state perturbed by N(0, init_var I), covariance init_var I"""
    offset = rng.standard_normal(3) * np.sqrt(init_var)
    mean = truth.as_array() + offset
    mean[1] = max(mean[1], MIN_RANGE)
    return CState(VehicleState.from_array(mean), init_var * np.eye(3))


def predict(s: CState, noise: NoiseModel, dt: float) -> CState:
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    E = transition_matrix(dt)
    mean = E @ s.vector
    cov = E @ s.cov @ E.T + noise.q_alpha
    return CState(VehicleState.from_array(mean), make_psd(cov))


def g1(state: VehicleState, carrier_freq: float, rsu: Sequence[float] = (0.0, 0.0)) -> np.ndarray:
    return los_parameters(state.qx - rsu[0], state.qy - rsu[1], state.v, carrier_freq)


def jacobian_g1(state: VehicleState, carrier_freq: float, rsu: Sequence[float] = (0.0, 0.0)) -> np.ndarray:
    """
    Analytic Jacobian of g1; rows (tau, mu, cos), columns (qx, qy, v).

    Raises:
        ValueError: If the vehicle is within MIN_RANGE of the RSU
    """
    qx, qy, v = state.qx - rsu[0], state.qy - rsu[1], state.v
    r = np.hypot(qx, qy)
    if r < MIN_RANGE:
        raise ValueError(f"range {r:.3g} m too small for the LoS Jacobian")
    c, fc, r3 = SPEED_OF_LIGHT, carrier_freq, r ** 3
    return np.array([
        [2.0 * qx / (c * r), 2.0 * qy / (c * r), 0.0],
        [2.0 * v * fc * qx * qy / (c * r3), -2.0 * v * fc * qx ** 2 / (c * r3), -2.0 * fc * qy / (c * r)],
        [qy ** 2 / r3, -qx * qy / r3, 0.0],
    ])


def los_model(scene: Scene) -> MeasurementModel:
    return MeasurementModel(
        regime="los",
        measure=lambda s: g1(s, scene.carrier_freq, scene.rsu_position),
        jacobian=lambda s: jacobian_g1(s, scene.carrier_freq, scene.rsu_position),
    )


def ckm_model(ckm: ChannelKnowledgeMap, steps: Sequence[float] = (0.01, 0.01, 0.01),
              path_ids: Optional[Sequence[int]] = None) -> MeasurementModel:
    ids = list(ckm.path_ids) if path_ids is None else list(path_ids)
    return MeasurementModel(
        regime="nlos",
        measure=lambda s: g2_measure(ckm, s, ids),
        jacobian=lambda s: jacobian_g2(ckm, s, steps, ids),
        n_paths=len(ids),
    )


def ekf_update(s_pred: CState, z: np.ndarray, regime: Regime, model: MeasurementModel,
               noise: NoiseModel) -> EkfUpdate:
    """
    Kalman update of a predicted state with measurement z.

    A numerically singular innovation covariance gets 1e-12 added to the
    diagonal of its unit-diagonal form and the update carries the
    "regularized" flag.
    """
    if model.regime != regime:
        raise ValueError(f"measurement model is for regime {model.regime!r}, not {regime!r}")
    Q = noise.q_beta1 if regime == "los" else noise.q_beta2(model.n_paths)
    z = np.asarray(z, dtype=float)
    if z.shape != (Q.shape[0],):
        raise ValueError(f"{regime} measurement must have length {Q.shape[0]}, got {z.shape}")

    flags: List[str] = []
    G = model.jacobian(s_pred.mean)
    C = s_pred.cov
    innovation = z - model.measure(s_pred.mean)
    S = G @ C @ G.T + Q

    # delay, Doppler and cosine differ by ~20 orders of magnitude; work on unit diagonal
    d = np.sqrt(np.diag(S))
    d[d == 0] = 1.0
    S_unit = S / np.outer(d, d)
    if np.linalg.cond(S_unit) > 1.0 / np.finfo(float).eps:
        S_unit = S_unit + REGULARIZATION * np.eye(len(S_unit))
        flags.append("regularized")
        logger.debug("Regularized singular innovation covariance")

    K = (np.linalg.solve(S_unit, (G @ C) / d[:, np.newaxis]) / d[:, np.newaxis]).T
    mean = s_pred.vector + K @ innovation
    cov = make_psd((np.eye(3) - K @ G) @ C)
    scaled = innovation / d
    nis = float(scaled @ np.linalg.solve(S_unit, scaled))

    if not np.all(np.isfinite(mean)) or mean[1] <= 0.0:
        flags.append("diverged")
        return EkfUpdate(s_pred, innovation, K, nis, flags)
    return EkfUpdate(CState(VehicleState.from_array(mean), cov), innovation, K, nis, flags)
