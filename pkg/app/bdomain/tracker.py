"""
MAP angle update from a separated echo block.
"""
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from app.bdomain.tpm import AngularBelief, AngularGrid, hard_predict, support
from app.signal.likelihood import profile_loglik_grid


@dataclass(frozen=True)
class MapUpdate:
    theta: float
    posterior: AngularBelief
    misaligned: bool = False


def map_update(prior: AngularBelief, R_i: np.ndarray, F: np.ndarray, frame_len: int,
               sigma_z2: float, grid: AngularGrid) -> MapUpdate:
    """
    Exhaustive MAP search over the prior's support.

    A uniform prior covers the whole grid, so the search degenerates to ML.
    When every candidate has -inf log-posterior the prior is returned
    unchanged and the update is marked misaligned.
    """
    idx, mass = support(prior)
    loglik = profile_loglik_grid(
        R_i, F, frame_len, sigma_z2, grid.steering(F.shape[0])[:, idx], grid.steering(R_i.shape[0])[:, idx]
    )
    log_post = np.log(mass) + loglik
    if not np.any(np.isfinite(log_post)):
        return MapUpdate(theta=hard_predict(prior, grid), posterior=prior, misaligned=True)

    best = int(np.argmax(log_post))
    pmf = np.zeros(grid.n_theta)
    pmf[idx] = np.exp(log_post - logsumexp(log_post))
    return MapUpdate(theta=float(grid.angles[idx[best]]), posterior=AngularBelief(pmf))
