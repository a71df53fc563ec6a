"""
Min-max power allocation across selected beams.

maximize t  s.t.  t <= a_i^2 sum_n gamma_n c_{i,n}  for every path i,
                  sum_n gamma_n <= budget,  gamma >= 0

The LP has ns + 1 variables, so it is solved exactly by enumerating the
vertices of the feasible polytope in a fixed order.
"""
import itertools
import logging
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from app.signal.waveform import steering_vector

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-10


def allocation_coeffs(A: np.ndarray, angles: Sequence[float], nr: int) -> np.ndarray:
    """
    c_{i,n} = sum_g |c(theta_i)_{(n, g)}|^2 (g - 1)^2 with c(theta) = (A^T kron b(theta)) a*(theta).

    Returns:
        (P, ns) non-negative matrix
    """
    nt, ns = A.shape
    weights = np.arange(nr) ** 2
    coeffs = np.empty((len(angles), ns))
    for i, theta in enumerate(angles):
        c = np.kron(A.T, steering_vector(theta, nr)[:, np.newaxis]) @ steering_vector(theta, nt).conj()
        coeffs[i] = (np.abs(c.reshape(ns, nr)) ** 2) @ weights
    return coeffs


@dataclass(frozen=True)
class AllocationProblem:
    coeffs: np.ndarray
    amplitudes: np.ndarray
    budget: float

    def __post_init__(self):
        coeffs = np.atleast_2d(np.asarray(self.coeffs, dtype=float))
        amplitudes = np.asarray(self.amplitudes, dtype=float)
        if np.any(coeffs < 0):
            raise ValueError("allocation coefficients must be non-negative")
        if amplitudes.shape != (coeffs.shape[0],):
            raise ValueError(f"expected {coeffs.shape[0]} amplitudes, got shape {amplitudes.shape}")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "amplitudes", amplitudes)

    @property
    def weighted(self) -> np.ndarray:
        """a_i^2 c_{i,n}"""
        return self.amplitudes[:, np.newaxis] ** 2 * self.coeffs

    def objective(self, gamma: Sequence[float]) -> float:
        return float(np.min(self.weighted @ np.asarray(gamma, dtype=float)))


@dataclass(frozen=True)
class AllocationResult:
    gamma: np.ndarray
    t: float
    flags: List[str] = field(default_factory=list)

    @property
    def degenerate(self) -> bool:
        return "degenerate_allocation" in self.flags


def allocate_power(problem: AllocationProblem) -> AllocationResult:
    """
    Optimal vertex of the min-max LP.

    Rows with all-zero weighted coefficients make the optimum 0; the equal
    split is returned with the "degenerate_allocation" flag.

    Raises:
        ValueError: If the budget is not positive
    """
    if problem.budget <= 0:
        raise ValueError(f"power budget must be positive, got {problem.budget}")
    M = problem.weighted
    P, ns = M.shape
    if np.any(np.all(M <= 0, axis=1)):
        logger.debug("Degenerate allocation: a path has no angle information under any beam")
        return AllocationResult(np.full(ns, problem.budget / ns), 0.0, ["degenerate_allocation"])

    # unit budget and unit largest coefficient
    scale = M.max()
    Mn = M / scale
    # constraints G x <= h on x = (gamma, t)
    G = np.vstack([
        np.hstack([-Mn, np.ones((P, 1))]),
        np.hstack([np.ones((1, ns)), np.zeros((1, 1))]),
        np.hstack([-np.eye(ns), np.zeros((ns, 1))]),
    ])
    h = np.concatenate([np.zeros(P), [1.0], np.zeros(ns)])

    best_x, best_t = None, -np.inf
    for rows in itertools.combinations(range(len(G)), ns + 1):
        sub = G[list(rows)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, h[list(rows)])
        if np.all(G @ x <= h + FEASIBILITY_TOL) and x[-1] > best_t + FEASIBILITY_TOL:
            best_x, best_t = x, x[-1]

    gamma = np.clip(best_x[:ns], 0.0, None) * problem.budget
    return AllocationResult(gamma, problem.objective(gamma))
