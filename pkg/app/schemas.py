"""
Pydantic schemas for simulation configuration, per-slot records and summaries.
These models define every knob the simulator reads and every row it writes.
"""
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Section(BaseModel):
    """Config section that rejects unknown keys"""
    model_config = ConfigDict(extra="forbid")


class Reflector(_Section):
    """Axis-parallel mirror reflector (line y = const)"""
    y: float = Field(description="Reflector line y coordinate (m)")
    loss: float = Field(default=0.5, gt=0.0, le=1.0, description="Real reflection loss factor in (0, 1]")


class Scene(_Section):
    """
    Synthetic scene: RSU, road and reflectors.
    The vehicle drives along the x-axis at y = road_y.
    """
    rsu_position: Tuple[float, float] = Field(default=(0.0, 0.0), description="RSU position (m)")
    nt: int = Field(default=32, ge=1, description="Transmit antennas")
    nr: int = Field(default=32, ge=1, description="Receive antennas")
    ns: int = Field(default=2, ge=1, description="Data streams / beams")
    carrier_freq: float = Field(default=30e9, gt=0.0, description="Carrier frequency (Hz)")
    road_y: float = Field(default=10.0, gt=0.0, description="Lane offset of the vehicle path (m)")
    reflectors: List[Reflector] = Field(
        default_factory=lambda: [Reflector(y=20.0, loss=0.5)],
        description="Single-bounce reflectors, one NLoS path each"
    )
    reflection_coeff: float = Field(default=1.0, description="Vehicle reflection coefficient epsilon")
    rcs_gain: float = Field(default=100.0, gt=0.0, description="Aperture/RCS gain on the free-space amplitude")

    @model_validator(mode="after")
    def _check_geometry(self) -> "Scene":
        if self.ns > self.nt:
            raise ValueError(f"ns={self.ns} must not exceed nt={self.nt}")
        ys = [r.y for r in self.reflectors]
        if len(set(ys)) != len(ys):
            raise ValueError("reflector lines must be distinct")
        for y in ys:
            if y <= self.road_y:
                raise ValueError(f"reflector y={y} must lie beyond road_y={self.road_y}")
        return self

    @property
    def n_paths(self) -> int:
        return 1 + len(self.reflectors)


class TrajectoryConfig(_Section):
    """Ground-truth motion of the vehicle"""
    initial: Tuple[float, float, float] = Field(default=(-20.0, 10.0, 10.0), description="(qx, qy, v) at slot 0")
    sigma: Tuple[float, float, float] = Field(default=(1e-3, 1e-3, 1e-3), description="Per-slot process noise std")
    accel: float = Field(default=0.5, description="Unmodeled longitudinal acceleration (m/s^2)")


class TimingConfig(_Section):
    t_max: float = Field(default=4.0, gt=0.0, description="Time of interest (s)")
    dt: float = Field(default=0.02, gt=0.0, description="Slot duration (s)")
    frame_len: int = Field(default=1024, ge=1, description="Symbols per slot L")
    t_p: float = Field(default=1e-8, gt=0.0, description="Sample interval (s)")


class PowerConfig(_Section):
    p_t: float = Field(default=16.0, gt=0.0, description="Total transmit power (W)")
    sigma_z2: float = Field(default=1e-9, ge=0.0, description="Receiver noise power (W)")


class SignalConfig(_Section):
    max_delay_index: int = Field(default=100, ge=0)
    max_doppler_index: int = Field(default=100, ge=0)
    doppler_step: Optional[float] = Field(default=None, gt=0.0, description="Doppler grid step in k units; None means 1/(4L)")
    doppler_source: Literal["model", "matched_filter"] = "model"
    detection_sigmas: float = Field(default=6.0, ge=0.0)
    association_gate: int = Field(default=3, ge=0, description="Delay cells between predicted and detected peaks")
    dynamic_range_db: float = Field(default=60.0, gt=0.0, description="Peaks this far below the strongest one are not confident")


class FilterConfig(_Section):
    q_alpha: Tuple[float, float, float] = Field(
        default=(1e-4, 1e-6, 2e-4),
        description="Process noise variances of (qx, qy, v); qx and v cover the unmodeled acceleration",
    )
    sigma_tau: float = Field(default=1e-8, gt=0.0)
    sigma_mu: float = Field(default=20.0, gt=0.0)
    sigma_cos: float = Field(default=0.01, gt=0.0)
    init_var: float = Field(default=0.25, gt=0.0)
    fd_steps: Tuple[float, float, float] = Field(default=(0.01, 0.01, 0.01))
    gate_probability: Optional[float] = Field(default=None, gt=0.0, lt=1.0, description="Chi-square innovation gate; None disables")


class TpmConfig(_Section):
    n_theta: int = Field(default=7200, ge=2)
    xi: float = Field(default=0.8, ge=0.0, le=1.0)
    c_pi: float = Field(default=0.6, ge=0.0, le=1.0)
    sigma_ckm: float = Field(default=1e-3, gt=0.0)
    band_divisor: float = Field(default=20.0, gt=0.0)
    min_band: int = Field(default=1, ge=0)


class BlockageConfig(_Section):
    """Random plus static (windowed) LoS blockage"""
    p_blk: float = Field(default=0.15, ge=0.0, le=1.0)
    static_window: Optional[Tuple[int, int]] = Field(default=(140, 175), description="Inclusive slot interval")

    @model_validator(mode="after")
    def _check_window(self) -> "BlockageConfig":
        if self.static_window is not None and self.static_window[0] > self.static_window[1]:
            raise ValueError("static_window start must not exceed end")
        return self

    @property
    def nlos_blockage_probability(self) -> float:
        return 1.0 - (1.0 - self.p_blk) ** 2


class CkmConfig(_Section):
    x_range: Tuple[float, float] = (-26.0, 26.0)
    y_range: Tuple[float, float] = (9.65, 10.35)
    n_x: int = Field(default=400, ge=1)
    n_y: int = Field(default=8, ge=1)
    k: int = Field(default=4, ge=1)
    idw_power: float = Field(default=2.0, gt=0.0)


class BeamformingConfig(_Section):
    mode: Literal["none", "equal", "optimized"] = "optimized"
    gain_source: Literal["ckm", "estimate"] = "ckm"


class MonteCarloConfig(_Section):
    runs: int = Field(default=100, ge=1)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)


class SimConfig(_Section):
    """
    Complete simulator configuration.
    Defaults describe a 4 s drive at 20 ms slots (200 slots) seen by 32x32 arrays at 16 W.
    """
    scene: Scene = Field(default_factory=Scene)
    trajectory: TrajectoryConfig = Field(default_factory=TrajectoryConfig)
    timing: TimingConfig = Field(default_factory=TimingConfig)
    power: PowerConfig = Field(default_factory=PowerConfig)
    signal: SignalConfig = Field(default_factory=SignalConfig)
    filter: FilterConfig = Field(default_factory=FilterConfig)
    tpm: TpmConfig = Field(default_factory=TpmConfig)
    blockage: BlockageConfig = Field(default_factory=BlockageConfig)
    ckm: CkmConfig = Field(default_factory=CkmConfig)
    beamforming: BeamformingConfig = Field(default_factory=BeamformingConfig)
    mc: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    scheme: Literal["proposed", "baseline", "both"] = "both"
    misalign_deg: float = Field(default=5.0, gt=0.0)

    @model_validator(mode="after")
    def _check_cross_section(self) -> "SimConfig":
        if self.ckm.k > self.ckm.n_x * self.ckm.n_y:
            raise ValueError("ckm.k must not exceed the number of CKM samples")
        return self

    @property
    def n_slots(self) -> int:
        return int(round(self.timing.t_max / self.timing.dt))

    @property
    def budget(self) -> float:
        """Per-beam power budget P_t / nt"""
        return self.power.p_t / self.scene.nt

    @property
    def doppler_step(self) -> float:
        return self.signal.doppler_step or 1.0 / (4.0 * self.timing.frame_len)

    @property
    def schemes(self) -> List[str]:
        return ["proposed", "baseline"] if self.scheme == "both" else [self.scheme]


class SlotRecord(BaseModel):
    """One row of slots.csv: a single slot of a single run of one scheme"""
    run_id: int
    slot: int
    scheme: str
    true_qx: float
    true_qy: float
    true_v: float
    est_qx: float
    est_qy: float
    est_v: float
    position_error: float
    los_present: bool
    regime: Literal["los", "nlos", "predict"]
    alive: List[bool]
    detected: List[bool]
    kind: List[str]
    true_aoa_deg: List[float]
    est_aoa_deg: List[float]
    aoa_error_deg: List[float]
    misaligned: List[bool]
    plan_mode: str
    plan_angles_deg: List[float]
    plan_gamma: List[float]
    prior_entropy: List[float] = Field(default_factory=list, description="Per-path AoA belief entropy before the update (nats)")
    posterior_entropy: List[float] = Field(default_factory=list, description="Per-path AoA belief entropy after the update (nats)")
    innovation: List[float] = Field(default_factory=list, description="EKF innovation z - g(prediction); empty without an update")
    nis: float = Field(default=float("nan"), description="Normalized innovation squared; NaN without an update")
    flags: List[str] = Field(default_factory=list)


class SchemeSummary(BaseModel):
    rmse_per_slot: List[float]
    mean_rmse: float
    final_rmse: float
    mean_aoa_error: Dict[str, float]
    aoa_percentiles: Dict[str, Dict[str, float]]
    cdf_at_zero: Dict[str, float]
    mean_aoa_by_kind: Dict[str, Dict[str, float]]
    misalignment_rate: Dict[str, float]
    flag_counts: Dict[str, int]
    aoa_cdf_levels_deg: List[float] = Field(default_factory=list)
    aoa_cdf: Dict[str, List[float]] = Field(default_factory=dict, description="Per-path empirical AoA error CDF at aoa_cdf_levels_deg")


class ExperimentSummary(BaseModel):
    config: dict
    n_runs: int
    n_slots: int
    schemes: Dict[str, SchemeSummary]


class SweepRow(BaseModel):
    param: str
    value: float
    scheme: str
    mean_aoa_error: Dict[str, float]
    mean_rmse: float
    final_rmse: float
