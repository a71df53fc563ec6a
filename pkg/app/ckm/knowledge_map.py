"""
Channel knowledge map built from sampled scene evaluations and queried with
inverse-distance-weighted K-nearest-neighbour interpolation.
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import cKDTree

from app.env.scene import VehicleState, ground_truth_paths
from app.schemas import CkmConfig, Scene

logger = logging.getLogger(__name__)

# Queries closer than this to a stored sample return it verbatim (m)
EXACT_HIT_DISTANCE = 1e-9

FIELDS = ("alpha", "theta", "tau", "d")


@dataclass(frozen=True)
class CkmSample:
    location: np.ndarray
    path_ids: Tuple[int, ...]
    amp_loss: np.ndarray
    aoa: np.ndarray
    delay: np.ndarray
    doppler_per_velocity: np.ndarray


@dataclass(frozen=True)
class PathTuple:
    """Interpolated parameters of one path at a query point"""
    path_id: int
    amp_loss: float
    aoa: float
    delay: float
    doppler: float


class ChannelKnowledgeMap:
    """
    Immutable map from location to per-path (alpha, theta, tau, doppler factor).

    Fields are stored as (n_samples, n_paths) arrays; angles are interpolated in
    the cosine domain.
    """

    def __init__(self, locations: np.ndarray, path_ids: Sequence[int], amp_loss: np.ndarray,
                 aoa: np.ndarray, delay: np.ndarray, doppler_per_velocity: np.ndarray,
                 k: int = 4, idw_power: float = 2.0, reflection_coeff: float = 1.0):
        locations = np.asarray(locations, dtype=float).reshape(-1, 2)
        if len(locations) == 0:
            raise ValueError("CKM needs at least one sample")
        if len(np.unique(locations, axis=0)) != len(locations):
            raise ValueError("CKM sample locations must be pairwise distinct")
        if k < 1:
            raise ValueError(f"k must be at least 1, got {k}")
        if idw_power <= 0:
            raise ValueError(f"idw_power must be positive, got {idw_power}")

        self.locations = locations
        self.path_ids = tuple(int(i) for i in path_ids)
        self.amp_loss = np.asarray(amp_loss, dtype=float).reshape(len(locations), -1)
        self.aoa = np.asarray(aoa, dtype=float).reshape(len(locations), -1)
        self.delay = np.asarray(delay, dtype=float).reshape(len(locations), -1)
        self.doppler_per_velocity = np.asarray(doppler_per_velocity, dtype=float).reshape(len(locations), -1)
        self._cos = np.cos(self.aoa)
        self.k = min(k, len(locations))
        self.idw_power = idw_power
        self.reflection_coeff = reflection_coeff
        self._tree = cKDTree(locations)

    @property
    def n_samples(self) -> int:
        return len(self.locations)

    @property
    def n_paths(self) -> int:
        return len(self.path_ids)

    def sample(self, index: int) -> CkmSample:
        return CkmSample(
            location=self.locations[index].copy(),
            path_ids=self.path_ids,
            amp_loss=self.amp_loss[index].copy(),
            aoa=self.aoa[index].copy(),
            delay=self.delay[index].copy(),
            doppler_per_velocity=self.doppler_per_velocity[index].copy(),
        )

    def _weights(self, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        dist, idx = self._tree.query(q, k=self.k)
        dist, idx = np.atleast_1d(dist), np.atleast_1d(idx)
        if dist[0] < EXACT_HIT_DISTANCE:
            return idx[:1], np.ones(1)
        w = 1.0 / dist ** self.idw_power
        return idx, w / w.sum()

    def interpolate(self, q: Sequence[float]) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        Interpolate (alpha, cos(theta), tau, doppler factor) per path at q.

        Returns:
            Four arrays of length n_paths, path-id order
        """
        q = np.asarray(q, dtype=float)
        if not np.all(np.isfinite(q)):
            raise ValueError(f"query location must be finite, got {q}")
        idx, w = self._weights(q)
        return (
            w @ self.amp_loss[idx],
            w @ self._cos[idx],
            w @ self.delay[idx],
            w @ self.doppler_per_velocity[idx],
        )

    def gains(self, q: Sequence[float]) -> np.ndarray:
        """|beta_i| = epsilon * alpha_i^2 at q"""
        alpha = self.interpolate(q)[0]
        return np.abs(self.reflection_coeff) * alpha ** 2

    def save_table(self, path: Union[str, Path]) -> Path:
        """Write the flat text table: x y then alpha_i theta_i tau_i d_i per path"""
        path = Path(path)
        header = ["x", "y"] + [f"{name}_{pid}" for pid in self.path_ids for name in FIELDS]
        per_path = np.stack([self.amp_loss, self.aoa, self.delay, self.doppler_per_velocity], axis=2)
        table = np.hstack([self.locations, per_path.reshape(self.n_samples, -1)])
        np.savetxt(path, table, header=" ".join(header), comments="", fmt="%.17g")
        logger.info("Saved CKM table with %d samples to %s", self.n_samples, path)
        return path

    @classmethod
    def load_table(cls, path: Union[str, Path], k: int = 4, idw_power: float = 2.0,
                   reflection_coeff: float = 1.0) -> "ChannelKnowledgeMap":
        path = Path(path)
        with path.open() as f:
            header = f.readline().split()
        if header[:2] != ["x", "y"] or (len(header) - 2) % len(FIELDS):
            raise ValueError(f"malformed CKM table header in {path}")
        path_ids = [int(col.split("_")[1]) for col in header[2::len(FIELDS)]]
        table = np.atleast_2d(np.loadtxt(path, skiprows=1))
        per_path = table[:, 2:].reshape(len(table), len(path_ids), len(FIELDS))
        return cls(
            locations=table[:, :2],
            path_ids=path_ids,
            amp_loss=per_path[:, :, 0],
            aoa=per_path[:, :, 1],
            delay=per_path[:, :, 2],
            doppler_per_velocity=per_path[:, :, 3],
            k=k,
            idw_power=idw_power,
            reflection_coeff=reflection_coeff,
        )


def road_strip_locations(cfg: CkmConfig) -> np.ndarray:
    """Regular n_x by n_y sample grid over the road strip"""
    xs = np.linspace(cfg.x_range[0], cfg.x_range[1], cfg.n_x)
    ys = np.linspace(cfg.y_range[0], cfg.y_range[1], cfg.n_y)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def build_ckm(scene: Scene, sample_locations: Sequence[Sequence[float]], k: int = 4,
              idw_power: float = 2.0, t_p: float = 1e-8) -> ChannelKnowledgeMap:
    """
    Sample the analytic scene at each location with unit velocity.

    Raises:
        ValueError: On duplicate locations or unreachable geometry
    """
    locations = np.asarray(sample_locations, dtype=float).reshape(-1, 2)
    rows = []
    for x, y in locations:
        rows.append(ground_truth_paths(scene, VehicleState(float(x), float(y), 1.0), t_p=t_p))

    ckm = ChannelKnowledgeMap(
        locations=locations,
        path_ids=[p.path_id for p in rows[0]] if rows else [],
        amp_loss=[[p.amp_loss for p in r] for r in rows],
        aoa=[[p.aoa for p in r] for r in rows],
        delay=[[p.delay for p in r] for r in rows],
        doppler_per_velocity=[[p.doppler for p in r] for r in rows],
        k=k,
        idw_power=idw_power,
        reflection_coeff=scene.reflection_coeff,
    )
    logger.info("Built CKM with %d samples, %d paths, k=%d", ckm.n_samples, ckm.n_paths, ckm.k)
    return ckm


def query_ckm(ckm: ChannelKnowledgeMap, q: Sequence[float], v: float) -> List[PathTuple]:
    """Per-path (alpha, theta, tau, mu) at location q and speed v"""
    alpha, cos_theta, tau, d = ckm.interpolate(q)
    theta = np.arccos(np.clip(cos_theta, -1.0, 1.0))
    return [
        PathTuple(pid, float(alpha[i]), float(theta[i]), float(tau[i]), float(d[i] * v))
        for i, pid in enumerate(ckm.path_ids)
    ]


def _columns(ckm: ChannelKnowledgeMap, path_ids: Optional[Sequence[int]]) -> np.ndarray:
    if path_ids is None:
        return np.arange(ckm.n_paths)
    try:
        return np.array([ckm.path_ids.index(pid) for pid in path_ids], dtype=int)
    except ValueError:
        raise ValueError(f"unknown path ids {list(path_ids)}; map holds {list(ckm.path_ids)}")


def g2_measure(ckm: ChannelKnowledgeMap, state: VehicleState,
               path_ids: Optional[Sequence[int]] = None) -> np.ndarray:
    """Stack [tau_1..tau_P; mu_1..mu_P; cos_1..cos_P] from the map"""
    cols = _columns(ckm, path_ids)
    _, cos_theta, tau, d = ckm.interpolate(state.position)
    return np.concatenate([tau[cols], d[cols] * state.v, cos_theta[cols]])


def jacobian_g2(ckm: ChannelKnowledgeMap, state: VehicleState,
                steps: Sequence[float] = (0.01, 0.01, 0.01),
                path_ids: Optional[Sequence[int]] = None) -> np.ndarray:
    """Forward-difference Jacobian of g2_measure, columns (qx, qy, v)"""
    steps = np.asarray(steps, dtype=float)
    if np.any(steps <= 0):
        raise ValueError(f"finite-difference steps must be positive, got {steps}")
    base = g2_measure(ckm, state, path_ids)
    x = state.as_array()
    columns = []
    for j in range(3):
        shifted = x.copy()
        shifted[j] += steps[j]
        columns.append((g2_measure(ckm, VehicleState.from_array(shifted), path_ids) - base) / steps[j])
    return np.column_stack(columns)
