"""
Error metrics and Monte Carlo aggregation.
"""
from collections import Counter, defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from app.schemas import SchemeSummary, SimConfig, SlotRecord

PERCENTILES = (50, 80, 90, 95)
# AoA error levels (deg) at which the summary samples each CDF
CDF_LEVELS_DEG = (0.0, 0.025, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 45.0, 90.0)


def aoa_error_deg(estimate: float, truth: float) -> float:
    """min(|d|, pi - |d|) in degrees; NaN estimates stay NaN"""
    d = abs(estimate - truth) % np.pi
    return float(np.degrees(min(d, np.pi - d)))


def position_error(est_xy: Sequence[float], true_xy: Sequence[float]) -> float:
    return float(np.hypot(est_xy[0] - true_xy[0], est_xy[1] - true_xy[1]))


def empirical_cdf(errors: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Sorted finite errors and their cumulative probabilities"""
    values = np.sort(np.asarray(errors, dtype=float)[np.isfinite(errors)])
    probs = np.arange(1, len(values) + 1) / max(len(values), 1)
    return values, probs


def cdf_at(errors: Sequence[float], levels: Sequence[float]) -> np.ndarray:
    """P(error <= level) for each level; zeros when no error is finite"""
    values, _ = empirical_cdf(errors)
    count = np.searchsorted(values, np.asarray(levels, dtype=float), side="right")
    return count / max(len(values), 1)


def rmse_per_slot(runs: Sequence[Sequence[SlotRecord]]) -> np.ndarray:
    errors = np.array([[r.position_error for r in run] for run in runs])
    return np.sqrt(np.mean(errors ** 2, axis=0))


def summarize_scheme(runs: Sequence[Sequence[SlotRecord]]) -> SchemeSummary:
    """
    Aggregate one scheme over all runs.

    AoA statistics pool every slot of every run per path; paths without any
    finite estimate are left out.
    """
    rmse = rmse_per_slot(runs)
    pooled: Dict[str, List[float]] = defaultdict(list)
    by_kind: Dict[str, Dict[str, List[float]]] = defaultdict(lambda: defaultdict(list))
    misaligned: Dict[str, List[bool]] = defaultdict(list)
    flags: Counter = Counter()

    for run in runs:
        for record in run:
            flags.update(flag.split(":")[0] for flag in record.flags)
            for i, err in enumerate(record.aoa_error_deg):
                if not np.isfinite(err):
                    continue
                path = str(i + 1)
                pooled[path].append(err)
                by_kind[path][record.kind[i]].append(err)
                misaligned[path].append(record.misaligned[i])

    return SchemeSummary(
        rmse_per_slot=[float(x) for x in rmse],
        mean_rmse=float(np.mean(rmse)),
        final_rmse=float(rmse[-1]),
        mean_aoa_error={p: float(np.mean(e)) for p, e in sorted(pooled.items())},
        aoa_percentiles={
            p: {f"p{q}": float(np.percentile(e, q)) for q in PERCENTILES} for p, e in sorted(pooled.items())
        },
        cdf_at_zero={p: float(cdf_at(e, [0.0])[0]) for p, e in sorted(pooled.items())},
        mean_aoa_by_kind={
            p: {k: float(np.mean(v)) for k, v in sorted(kinds.items())} for p, kinds in sorted(by_kind.items())
        },
        misalignment_rate={p: float(np.mean(m)) for p, m in sorted(misaligned.items())},
        flag_counts=dict(sorted(flags.items())),
        aoa_cdf_levels_deg=list(CDF_LEVELS_DEG),
        aoa_cdf={p: [float(x) for x in cdf_at(e, CDF_LEVELS_DEG)] for p, e in sorted(pooled.items())},
    )


def summarize(replicas: Sequence[Dict[str, List[SlotRecord]]], config: SimConfig) -> Dict[str, SchemeSummary]:
    return {scheme: summarize_scheme([rep[scheme] for rep in replicas]) for scheme in config.schemes}
