"""
Per-slot dual-domain tracking loop and the LoS-only baseline.

Each slot observes the echo produced by the beamformer planned in the
previous slot, updates the beam domain (per-path AoA beliefs) and the
coordinate domain (EKF), then predicts and plans the next slot.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import chi2

from app.bdomain.tpm import (
    AngularBelief,
    AngularGrid,
    TransitionKind,
    TransitionSpec,
    band_halfwidth,
    hard_predict,
    propagate_belief,
)
from app.bdomain.tracker import map_update
from app.beamform.plan import BeamformingPlan, build_plan
from app.cdomain.ekf import (
    CState,
    EkfUpdate,
    MeasurementModel,
    NoiseModel,
    ckm_model,
    ekf_update,
    g1,
    initial_state,
    los_model,
    predict,
)
from app.ckm.knowledge_map import ChannelKnowledgeMap, query_ckm
from app.env.scene import SPEED_OF_LIGHT, PathParams, ground_truth_paths
from app.harness.metrics import aoa_error_deg, position_error
from app.harness.scenario import Scenario
from app.schemas import SimConfig, SlotRecord
from app.signal.echo import EchoFrame, synthesize_echo
from app.signal.likelihood import gain_estimate
from app.signal.matched_filter import Peak, associate_peaks, matched_filter_search, separate_path
from app.signal.waveform import Beamformer, TxFrame, draw_frame

logger = logging.getLogger(__name__)

# Speed margin added to the predicted speed when sizing the Doppler search (m/s)
DOPPLER_SPEED_MARGIN = 5.0


@dataclass
class TrackerContext:
    """Mutable per-run tracker state; `slot` is the slot about to be processed"""
    config: SimConfig
    scenario: Scenario
    scheme: str
    grid: AngularGrid
    noise: NoiseModel
    cstate: CState
    beliefs: List[AngularBelief]
    kinds: List[TransitionKind]
    plan: BeamformingPlan
    frames_rng: np.random.Generator
    noise_rng: np.random.Generator
    measurement_rng: np.random.Generator
    los: MeasurementModel
    ckm: Optional[ChannelKnowledgeMap] = None
    gain_estimates: List[Optional[float]] = field(default_factory=list)
    slot: int = 0

    @property
    def n_paths(self) -> int:
        return self.config.scene.n_paths

    @property
    def path_ids(self) -> List[int]:
        return list(range(1, self.n_paths + 1))


@dataclass
class Observation:
    paths: List[PathParams]
    frame: TxFrame
    echo: EchoFrame
    doppler_noise: np.ndarray


def los_angle(cstate: CState, config: SimConfig) -> float:
    """Geometric LoS angle of a state"""
    cos_theta = g1(cstate.mean, config.scene.carrier_freq, config.scene.rsu_position)[2]
    return float(np.arccos(np.clip(cos_theta, -1.0, 1.0)))


def doppler_grid(config: SimConfig, speed: float) -> np.ndarray:
    """Doppler cells covering the reachable normalized shift, capped at max_doppler_index"""
    step = config.doppler_step
    reach = 2.0 * (abs(speed) + DOPPLER_SPEED_MARGIN) * config.scene.carrier_freq * config.timing.t_p / SPEED_OF_LIGHT
    half = min(config.signal.max_doppler_index, int(np.ceil(reach / step)))
    return step * np.arange(-half, half + 1)


def init_context(config: SimConfig, scenario: Scenario, scheme: str,
                 ckm: Optional[ChannelKnowledgeMap] = None) -> TrackerContext:
    """
    Tracker state before slot 0: perturbed initial estimate, uniform beliefs
    and a first plan toward the predicted path angles.
    """
    if scheme == "proposed" and ckm is None:
        raise ValueError("the proposed scheme needs a channel knowledge map")
    scene = config.scene
    grid = AngularGrid(config.tpm.n_theta)
    cstate = initial_state(scenario.truth[0], config.filter.init_var, scenario.rng("init"))
    n_paths = scene.n_paths

    if scheme == "proposed":
        predicted = query_ckm(ckm, cstate.mean.position, cstate.mean.v)
        plan = build_plan(
            [p.aoa for p in predicted], ckm.gains(cstate.mean.position), scene.ns, scene.nt, scene.nr,
            config.budget, config.beamforming.mode,
        )
    else:
        plan = _baseline_plan(cstate, config)

    return TrackerContext(
        config=config,
        scenario=scenario,
        scheme=scheme,
        grid=grid,
        noise=NoiseModel.from_config(config.filter),
        cstate=cstate,
        beliefs=[AngularBelief.uniform(grid.n_theta) for _ in range(n_paths)],
        kinds=[scenario.transition_kind(0, i) for i in range(n_paths)],
        plan=plan,
        frames_rng=scenario.rng("frames"),
        noise_rng=scenario.rng("noise"),
        measurement_rng=scenario.rng("measurement"),
        los=los_model(scene),
        ckm=ckm,
        gain_estimates=[None] * n_paths,
    )


def observe(ctx: TrackerContext) -> Observation:
    """Ground truth, transmit frame, echo and Doppler measurement noise of the current slot"""
    cfg = ctx.config
    truth = ctx.scenario.truth[ctx.slot]
    alive = ctx.scenario.blockage.alive[ctx.slot]
    paths = [p.with_alive(a) for p, a in zip(ground_truth_paths(cfg.scene, truth, cfg.timing.t_p), alive)]
    frame = draw_frame(cfg.scene.ns, cfg.timing.frame_len, ctx.frames_rng)
    echo = synthesize_echo(
        paths, ctx.plan.beamformer, frame, cfg.power.sigma_z2, ctx.noise_rng, cfg.scene.nr,
        cfg.signal.max_delay_index,
    )
    return Observation(paths, frame, echo, ctx.measurement_rng.standard_normal(len(paths)))


def measured_doppler(config: SimConfig, path: PathParams, peak: Peak, noise: float) -> float:
    if config.signal.doppler_source == "matched_filter":
        return peak.doppler_index / config.timing.t_p
    return path.doppler + config.filter.sigma_mu * noise


def filter_update(ctx: TrackerContext, z: np.ndarray, model: MeasurementModel,
                  flags: List[str]) -> Tuple[CState, EkfUpdate]:
    """EKF update with the optional chi-square innovation gate; a gated update keeps the prior state"""
    update = ekf_update(ctx.cstate, z, model.regime, model, ctx.noise)
    flags.extend(update.flags)
    gate = ctx.config.filter.gate_probability
    if gate is not None and update.nis > chi2.ppf(gate, df=len(z)):
        flags.append("gated")
        return ctx.cstate, update
    return update.state, update


def _record(ctx: TrackerContext, obs: Observation, estimate: CState, regime: str, detected: List[bool],
            est_angles: List[float], map_misaligned: List[bool], flags: List[str],
            entropy: Tuple[List[float], List[float]], update: Optional[EkfUpdate]) -> SlotRecord:
    truth = ctx.scenario.truth[ctx.slot]
    errors = [aoa_error_deg(est, p.aoa) for est, p in zip(est_angles, obs.paths)]
    misaligned = [
        bool(flagged or (np.isfinite(err) and err > ctx.config.misalign_deg))
        for flagged, err in zip(map_misaligned, errors)
    ]
    return SlotRecord(
        run_id=ctx.scenario.run_id,
        slot=ctx.slot,
        scheme=ctx.scheme,
        true_qx=truth.qx,
        true_qy=truth.qy,
        true_v=truth.v,
        est_qx=estimate.mean.qx,
        est_qy=estimate.mean.qy,
        est_v=estimate.mean.v,
        position_error=position_error(estimate.mean.position, truth.position),
        los_present=bool(obs.paths[0].alive),
        regime=regime,
        alive=[bool(p.alive) for p in obs.paths],
        detected=detected,
        kind=[k.value for k in ctx.kinds],
        true_aoa_deg=[float(np.degrees(p.aoa)) for p in obs.paths],
        est_aoa_deg=[float(np.degrees(a)) for a in est_angles],
        aoa_error_deg=errors,
        misaligned=misaligned,
        plan_mode=ctx.plan.mode,
        plan_angles_deg=[float(np.degrees(a)) for a in ctx.plan.angles],
        plan_gamma=[float(g) for g in ctx.plan.gamma],
        prior_entropy=entropy[0],
        posterior_entropy=entropy[1],
        innovation=[] if update is None else [float(x) for x in update.innovation],
        nis=float("nan") if update is None else update.nis,
        flags=flags,
    )


def _log_slot(record: SlotRecord) -> None:
    logger.debug(
        "run %d slot %d %s regime=%s flags=%s",
        record.run_id, record.slot, record.scheme, record.regime, ",".join(record.flags) or "-",
    )


def run_slot(ctx: TrackerContext) -> SlotRecord:
    """
    One slot of the proposed CKM-assisted dual-domain tracker.

    Order: echo under the previous plan, matched filter and path separation,
    per-path MAP update, EKF update (LoS regime when the LoS path is detected,
    else the CKM regime on the detected paths), EKF predict, CKM query at the
    predicted state, belief propagation and the next plan.
    """
    cfg, grid = ctx.config, ctx.grid
    L, sigma_z2, t_p = cfg.timing.frame_len, cfg.power.sigma_z2, cfg.timing.t_p
    obs = observe(ctx)
    flags: List[str] = list(ctx.plan.flags)
    R, S = obs.echo.R, obs.frame.S

    predicted = query_ckm(ctx.ckm, ctx.cstate.mean.position, ctx.cstate.mean.v)
    search = matched_filter_search(
        R, S, np.arange(cfg.signal.max_delay_index + 1), doppler_grid(cfg, ctx.cstate.mean.v),
        ctx.n_paths, sigma_z2, cfg.signal.detection_sigmas, cfg.signal.dynamic_range_db,
    )
    flags.extend(search.flags)
    assigned = associate_peaks(search.peaks, [int(round(p.delay / t_p)) for p in predicted], cfg.signal.association_gate)

    posteriors, est_angles, detected, map_flagged = [], [], [], []
    measurements = {}
    for i, path in enumerate(obs.paths):
        prior = ctx.beliefs[i]
        peak = assigned[i] if path.alive else None
        if peak is None:
            if path.alive:
                flags.append(f"missed:{path.path_id}")
            posteriors.append(prior)
            est_angles.append(hard_predict(prior, grid))
            detected.append(False)
            map_flagged.append(False)
            continue
        echo = peak.echo if peak.echo is not None else R
        R_i = separate_path(echo, S, peak.delay_index, peak.doppler_index)
        update = map_update(prior, R_i, ctx.plan.F, L, sigma_z2, grid)
        if update.misaligned:
            flags.append(f"misaligned:{path.path_id}")
        gain = gain_estimate(R_i, update.theta, ctx.plan.F, L)
        ctx.gain_estimates[i] = abs(gain) if gain is not None else None
        posteriors.append(update.posterior)
        est_angles.append(update.theta)
        detected.append(True)
        map_flagged.append(update.misaligned)
        measurements[path.path_id] = (
            peak.delay_index * t_p,
            measured_doppler(cfg, path, peak, obs.doppler_noise[i]),
            float(np.cos(update.theta)),
        )

    if detected[0]:
        regime = "los"
        estimate, ekf = filter_update(ctx, np.array(measurements[1]), ctx.los, flags)
    elif measurements:
        regime = "nlos"
        ids = sorted(measurements)
        z = np.array([measurements[pid][block] for block in range(3) for pid in ids])
        model = ckm_model(ctx.ckm, cfg.filter.fd_steps, ids)
        estimate, ekf = filter_update(ctx, z, model, flags)
    else:
        regime = "predict"
        estimate, ekf = ctx.cstate, None
        flags.append("prediction_only")

    entropy = ([b.entropy for b in ctx.beliefs], [b.entropy for b in posteriors])
    record = _record(ctx, obs, estimate, regime, detected, est_angles, map_flagged, flags, entropy, ekf)
    _log_slot(record)
    _advance(ctx, estimate, posteriors)
    return record


def _advance(ctx: TrackerContext, estimate: CState, posteriors: List[AngularBelief]) -> None:
    """Predict the state, propagate the beliefs and plan the next slot"""
    cfg, scene, tpm = ctx.config, ctx.config.scene, ctx.config.tpm
    ctx.cstate = predict(estimate, ctx.noise, cfg.timing.dt)
    ctx.slot += 1
    mean = ctx.cstate.mean
    predicted = query_ckm(ctx.ckm, mean.position, mean.v)
    eps = band_halfwidth(mean.v, cfg.timing.dt, predicted[0].aoa, tpm.n_theta, tpm.band_divisor, tpm.min_band)
    in_range = ctx.slot < ctx.scenario.n_slots
    ctx.kinds = [
        ctx.scenario.transition_kind(ctx.slot, i) if in_range else TransitionKind.STATIONARY
        for i in range(ctx.n_paths)
    ]
    ctx.beliefs = [
        propagate_belief(post, TransitionSpec(kind, tpm.c_pi, tpm.xi, eps, tpm.sigma_ckm, p.aoa), ctx.grid)
        for post, kind, p in zip(posteriors, ctx.kinds, predicted)
    ]
    # a uniform belief carries no direction; steer those paths by the map instead
    angles = [
        p.aoa if kind == TransitionKind.UNPREDICTABLE else hard_predict(b, ctx.grid)
        for b, kind, p in zip(ctx.beliefs, ctx.kinds, predicted)
    ]
    gains = ctx.ckm.gains(mean.position)
    if cfg.beamforming.gain_source == "estimate":
        gains = np.array([est if est is not None else g for est, g in zip(ctx.gain_estimates, gains)])
    ctx.plan = build_plan(angles, gains, scene.ns, scene.nt, scene.nr, cfg.budget, cfg.beamforming.mode)


def _baseline_plan(cstate: CState, config: SimConfig) -> BeamformingPlan:
    theta = los_angle(cstate, config)
    scene = config.scene
    beamformer = Beamformer.single_beam(theta, scene.nt, scene.ns, config.budget)
    return BeamformingPlan(beamformer, "baseline", (theta,) * scene.ns, (1,) * scene.ns)


def run_baseline_slot(ctx: TrackerContext) -> SlotRecord:
    """
    One slot of the LoS-only baseline.

    With the LoS path present its echo is separated at the true delay and
    Doppler, the AoA is the MAP estimate under a temporal band around the
    predicted geometric angle, and the EKF runs the LoS update. Without it
    the slot is prediction only. NLoS paths are never processed.
    """
    cfg, grid, tpm = ctx.config, ctx.grid, ctx.config.tpm
    obs = observe(ctx)
    flags: List[str] = []
    predicted_angle = los_angle(ctx.cstate, cfg)
    los = obs.paths[0]

    if los.alive:
        R_1 = separate_path(obs.echo.R, obs.frame.S, los.delay_index, los.doppler_index)
        eps = band_halfwidth(ctx.cstate.mean.v, cfg.timing.dt, predicted_angle, tpm.n_theta,
                             tpm.band_divisor, tpm.min_band)
        prior = propagate_belief(
            AngularBelief.one_hot(grid.n_theta, grid.nearest_index(predicted_angle)),
            TransitionSpec(TransitionKind.STATIONARY, 0.0, tpm.xi, eps, tpm.sigma_ckm, predicted_angle),
            grid,
        )
        update = map_update(prior, R_1, ctx.plan.F, cfg.timing.frame_len, cfg.power.sigma_z2, grid)
        if update.misaligned:
            flags.append("misaligned:1")
        z = np.array([
            los.delay_index * cfg.timing.t_p,
            los.doppler + cfg.filter.sigma_mu * obs.doppler_noise[0],
            np.cos(update.theta),
        ])
        estimate, ekf = filter_update(ctx, z, ctx.los, flags)
        regime, theta, map_flagged = "los", update.theta, update.misaligned
        entropy = ([prior.entropy], [update.posterior.entropy])
    else:
        estimate, ekf = ctx.cstate, None
        flags.append("prediction_only")
        regime, theta, map_flagged = "predict", predicted_angle, False
        entropy = ([np.nan], [np.nan])

    n_other = ctx.n_paths - 1
    record = _record(
        ctx, obs, estimate, regime,
        detected=[bool(los.alive)] + [False] * n_other,
        est_angles=[theta] + [np.nan] * n_other,
        map_misaligned=[map_flagged] + [False] * n_other,
        flags=flags,
        entropy=(entropy[0] + [np.nan] * n_other, entropy[1] + [np.nan] * n_other),
        update=ekf,
    )
    _log_slot(record)

    ctx.cstate = predict(estimate, ctx.noise, cfg.timing.dt)
    ctx.slot += 1
    if ctx.slot < ctx.scenario.n_slots:
        ctx.kinds = [ctx.scenario.transition_kind(ctx.slot, i) for i in range(ctx.n_paths)]
    ctx.plan = _baseline_plan(ctx.cstate, cfg)
    return record
