"""Scenario configuration, seeded Monte Carlo execution, and output emission.

A trial simulates frames of: truth evolution -> pilot snapshot ->
tracker predict/update -> data-phase beamformed power -> misalignment
detection (optional realignment) -> MSE-bound bookkeeping.  All schemes
consume identical truth and noise streams per (trial, frame), so scheme
comparisons are paired.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from . import rng as rngmod
from .analysis import bound_step
from .baselines import (
    AbpTracker,
    BeamPairConfig,
    CodebookTracker,
    build_codebook,
)
from .channel import (
    ArrayConfig,
    ChannelRealization,
    PilotConfig,
    channel_matrix,
    complex_noise,
    evolve_gain,
    beamforming_weight,
)
from .ekf import (
    InnovationNoiseEstimator,
    TrackerState,
    initial_state,
    jacobian,
    predict,
    update,
)
from .errors import ConfigError, MeasurementFailure
from .geometry import (
    SpatialState,
    angles_to_spatial,
    elevation_from_geometry,
    rotation_matrix,
)
from .misalign import DetectConfig, DetectorState, detect_step
from .monopulse import extract_measurement

SCHEMES = ("proposed", "codebook", "abp")

SCHEMA_VERSION = 1

TRACE_COLUMNS = (
    "frame,u_true,v_true,u_hat,v_hat,err_norm,err_norm_hat,p_r,"
    "detected,realigned,bound,innov_norm,meas_valid"
)


@dataclass
class ScenarioConfig:
    """Full description of one experiment."""

    n_x: int = 8
    n_y: int = 8
    scheme: str = "proposed"
    frames: int = 50
    trials: int = 100
    snr_db: float = 10.0
    snr_reference: str = "array"
    sigma_u: float = 0.005
    sigma_v: float = 0.005
    sigma_init: float = 5e-5
    psi: float | None = None            # None -> 2*pi / frames
    height_ratio: float = 8.0           # h / R_o
    azimuth_range_deg: float = 30.0
    d_over_lambda: float = 0.5
    rho_gain: float = 0.995
    gain_innovation_var: float | None = 1e-4  # None -> literal 1 - rho^2/2
    sigma_n_sq: float = 5e-6            # filter's assumed monopulse noise var
    q_n_mode: str = "estimated"
    q_n_window: int = 20
    jacobian_mode: str = "paper-approx"
    codebook_k: int | None = None       # None -> n_x
    abp_offset: float | None = None     # None -> half 3dB beamwidth
    abp_q_n: str = "delta"              # "delta" propagation or "fixed" sigma_n_sq*I
    gain_uncertainty_var: float = 0.5   # codebook filter's design inflation
    sigma_nb_sq: float = 3e-5           # relaxed bound measurement variance
    detect_enabled: bool = True
    detect_threshold: float | None = None       # None -> 0.89*pi/n_x
    detect_consecutive: int = 1
    detect_residual: float = 0.02
    seed: int = 0

    def __post_init__(self):
        if self.frames < 1 or self.trials < 1:
            raise ConfigError("frames and trials must be >= 1")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}")
        if min(self.sigma_u, self.sigma_v, self.sigma_init) < 0:
            raise ConfigError("std-devs must be non-negative")
        if self.q_n_mode not in ("fixed", "estimated"):
            raise ConfigError("q_n_mode must be 'fixed' or 'estimated'")
        if self.jacobian_mode not in ("paper-approx", "exact"):
            raise ConfigError("jacobian_mode must be 'paper-approx' or 'exact'")
        if self.abp_q_n not in ("fixed", "delta"):
            raise ConfigError("abp_q_n must be 'fixed' or 'delta'")
        if self.snr_reference not in ("element", "array"):
            raise ConfigError("snr_reference must be 'element' or 'array'")
        if self.n_x < 2 or self.n_y < 2:
            raise ConfigError("array needs at least 2 elements per axis")

    # derived pieces -------------------------------------------------

    @property
    def arr(self) -> ArrayConfig:
        return ArrayConfig(self.n_x, self.n_y)

    @property
    def psi_value(self) -> float:
        return 2.0 * np.pi / self.frames if self.psi is None else self.psi

    @property
    def k_beams(self) -> int:
        return self.n_x if self.codebook_k is None else self.codebook_k

    def pilot(self) -> PilotConfig:
        return PilotConfig(snr_db=self.snr_db, snr_reference=self.snr_reference)

    def detect(self) -> DetectConfig:
        overrides = dict(
            consecutive_required=self.detect_consecutive,
            residual_after_realign=self.detect_residual,
            enabled=self.detect_enabled,
        )
        if self.detect_threshold is not None:
            overrides["threshold"] = self.detect_threshold
        return DetectConfig.for_array(self.n_x, **overrides)

    def q_p(self) -> np.ndarray:
        return np.diag([self.sigma_u**2, self.sigma_v**2])

    def to_dict(self) -> dict:
        return asdict(self)

    @staticmethod
    def from_dict(d: dict) -> "ScenarioConfig":
        try:
            return ScenarioConfig(**d)
        except TypeError as exc:
            raise ConfigError(f"bad configuration field: {exc}") from exc

    @staticmethod
    def from_file(path) -> "ScenarioConfig":
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return ScenarioConfig.from_dict(data)


@dataclass
class FrameRecord:
    frame: int
    u_true: float
    v_true: float
    u_hat: float
    v_hat: float
    err_norm: float
    err_norm_hat: float
    p_r: float
    detected: bool
    realigned: bool
    bound: float
    innov_norm: float
    meas_valid: bool


@dataclass
class ComplexityLedger:
    """Table-of-complexity accounting: measurement size and pilot slots."""

    m: int
    pilot_slots: int = 0        # cumulative, units of T_s
    solve_cost: int = 0         # cumulative m^3 proxy

    def tick(self, slots_per_frame: int):
        self.pilot_slots += slots_per_frame
        self.solve_cost += self.m**3


class ProposedTracker:
    """The monopulse-measurement EKF (the scheme under study)."""

    def __init__(self, cfg: ScenarioConfig, state: TrackerState):
        self.arr = cfg.arr
        self.f = rotation_matrix(cfg.psi_value)
        self.q_p = cfg.q_p()
        self.state = state
        self.jacobian_mode = cfg.jacobian_mode
        self.q_n_prior = np.eye(2) * cfg.sigma_n_sq
        self.q_n_mode = cfg.q_n_mode
        # floor the estimate at a tenth of the design prior: an estimate
        # near zero (transient-biased window) would saturate the gain and
        # inject raw measurement noise into the state
        self.estimator = InnovationNoiseEstimator(
            window=cfg.q_n_window, floor=cfg.sigma_n_sq / 10.0
        )
        self.m_dim = 2
        self.pilot_slots_per_frame = 1
        self.last_q_n = self.q_n_prior

    def step(self, y_snapshot: np.ndarray) -> dict:
        pred = predict(self.state, self.f, self.q_p)
        try:
            meas = extract_measurement(y_snapshot, self.arr)
        except MeasurementFailure:
            self.state = pred
            return {
                "state": pred,
                "innovation_norm": float("nan"),
                "meas_valid": False,
                "kalman_gain": np.zeros((2, 2)),
                "g_mat": jacobian(pred.x, self.jacobian_mode),
            }
        g = jacobian(pred.x, self.jacobian_mode)
        if self.q_n_mode == "estimated":
            q_n = self.estimator.estimate(self.q_n_prior)
        else:
            q_n = self.q_n_prior
        self.last_q_n = q_n
        new_state, innovation, k = update(pred, meas.r, g, q_n)
        self.estimator.push(innovation, g, pred.p)
        self.state = new_state
        return {
            "state": new_state,
            "innovation_norm": float(np.linalg.norm(innovation)),
            "meas_valid": True,
            "kalman_gain": k,
            "g_mat": g,
        }

    def reinitialize(self, state: TrackerState):
        self.state = state
        self.estimator = InnovationNoiseEstimator(window=self.estimator.window)


def _build_tracker(cfg: ScenarioConfig, scheme: str, state: TrackerState):
    if scheme == "proposed":
        return ProposedTracker(cfg, state)
    codebook = build_codebook(cfg.k_beams, cfg.arr)
    f = rotation_matrix(cfg.psi_value)
    gain_var = cfg.gain_innovation_var
    if gain_var is None:
        gain_var = 1.0 - cfg.rho_gain**2 / 2.0
    if scheme == "codebook":
        return CodebookTracker(
            codebook,
            f,
            cfg.q_p(),
            cfg.pilot(),
            state,
            gain_rho=cfg.rho_gain,
            gain_uncertainty_var=cfg.gain_uncertainty_var if gain_var > 0 else 0.0,
        )
    if scheme == "abp":
        pair = (
            BeamPairConfig(cfg.abp_offset)
            if cfg.abp_offset is not None
            else BeamPairConfig.for_array(cfg.n_x)
        )
        return AbpTracker(
            codebook,
            pair,
            f,
            cfg.q_p(),
            cfg.pilot(),
            state,
            sigma_n_sq=cfg.sigma_n_sq,
            q_n_source=cfg.abp_q_n,
        )
    raise ConfigError(f"unknown scheme {scheme!r}")


def run_trial(cfg: ScenarioConfig, trial_index: int, scheme: str | None = None) -> list[FrameRecord]:
    """Simulate one trial; deterministic given (cfg.seed, trial_index)."""
    scheme = cfg.scheme if scheme is None else scheme
    arr = cfg.arr
    pilot = cfg.pilot()
    detect_cfg = cfg.detect()
    f = rotation_matrix(cfg.psi_value)
    q_p = cfg.q_p()
    q_n_relaxed = np.eye(2) * cfg.sigma_nb_sq
    noise = _ProcessDraw(cfg)

    init_rng = rngmod.stream(cfg.seed, trial_index, 0, "init")
    phi = init_rng.uniform(
        -np.deg2rad(cfg.azimuth_range_deg), np.deg2rad(cfg.azimuth_range_deg)
    )
    theta = elevation_from_geometry(cfg.height_ratio, 1.0)
    truth = angles_to_spatial(phi, theta, cfg.d_over_lambda).as_array()
    x_hat0 = truth + init_rng.normal(0.0, cfg.sigma_init, 2)

    tracker = _build_tracker(cfg, scheme, initial_state(x_hat0, cfg.sigma_init))
    detector = DetectorState()
    alpha = 1.0 + 0.0j
    p_prev = tracker.state.p.copy()
    ledger = ComplexityLedger(m=tracker.m_dim)
    records: list[FrameRecord] = []

    for k in range(1, cfg.frames + 1):
        proc_rng = rngmod.stream(cfg.seed, trial_index, k, "process")
        truth = f @ truth + proc_rng.normal(0.0, [cfg.sigma_u, cfg.sigma_v])
        gain_rng = rngmod.stream(cfg.seed, trial_index, k, "gain")
        alpha = evolve_gain(alpha, cfg.rho_gain, gain_rng, noise.gain_var)

        chan = ChannelRealization(gain=alpha, spatial=SpatialState.from_array(truth))
        h = channel_matrix(chan, arr)
        sig = h * pilot.pilot_symbol
        elem_power = float(np.mean(np.abs(sig) ** 2))
        var = pilot.noise_variance(elem_power, arr.n)
        pilot_rng = rngmod.stream(cfg.seed, trial_index, k, "pilot")
        y = sig + complex_noise(h.shape, var, pilot_rng)

        out = tracker.step(y if scheme == "proposed" else y.ravel())
        state: TrackerState = out["state"]
        ledger.tick(tracker.pilot_slots_per_frame)

        # data transmission phase: beamformed power toward the estimate
        w = beamforming_weight(state.estimate, arr)
        h_vec = h.ravel()
        data_sig = h_vec * pilot.data_symbol
        data_var = pilot.noise_variance(float(np.mean(np.abs(data_sig) ** 2)), arr.n)
        data_rng = rngmod.stream(cfg.seed, trial_index, k, "data")
        r_d = np.vdot(w, data_sig) + np.vdot(w, complex_noise(h_vec.shape, data_var, data_rng))
        p_r = float(abs(r_d) ** 2 / (arr.n * abs(chan.scalar_gain * pilot.data_symbol) ** 2))

        est = detect_step(p_r, detect_cfg, arr, detector)

        if scheme == "proposed" and out["meas_valid"]:
            bound = bound_step(
                p_prev, out["kalman_gain"], out["g_mat"], f, q_p, q_n_relaxed
            )
        else:
            bound = float("nan")
        p_prev = state.p.copy()

        xi = truth - state.x
        records.append(
            FrameRecord(
                frame=k,
                u_true=float(truth[0]),
                v_true=float(truth[1]),
                u_hat=float(state.x[0]),
                v_hat=float(state.x[1]),
                err_norm=float(np.linalg.norm(xi)),
                err_norm_hat=est.xi_hat,
                p_r=est.p_r,
                detected=est.detected,
                realigned=est.realigned,
                bound=bound,
                innov_norm=out["innovation_norm"],
                meas_valid=out["meas_valid"],
            )
        )

        if est.realigned:
            realign_rng = rngmod.stream(cfg.seed, trial_index, k, "realign")
            truth = realign_rng.normal(0.0, detect_cfg.residual_after_realign, 2)
            tracker.reinitialize(initial_state(np.zeros(2), cfg.sigma_init))
            p_prev = tracker.state.p.copy()

    assert ledger.pilot_slots == cfg.frames * tracker.pilot_slots_per_frame
    return records


class _ProcessDraw:
    """Resolved noise settings for a run."""

    def __init__(self, cfg: ScenarioConfig):
        self.gain_var = (
            1.0 - cfg.rho_gain**2 / 2.0
            if cfg.gain_innovation_var is None
            else cfg.gain_innovation_var
        )


@dataclass
class ExperimentSummary:
    scenario: dict
    per_frame_mse: list
    per_frame_bound: list
    detection_frames: list
    ledger: dict

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "scenario": self.scenario,
            "per_frame_mse": self.per_frame_mse,
            "per_frame_bound": self.per_frame_bound,
            "detection_frames": self.detection_frames,
            "ledger": self.ledger,
        }


def run_experiment(cfg: ScenarioConfig, scheme: str | None = None) -> ExperimentSummary:
    """Run all trials and aggregate per-frame statistics."""
    scheme = cfg.scheme if scheme is None else scheme
    sq_err = np.zeros(cfg.frames)
    bound_sum = np.zeros(cfg.frames)
    bound_count = np.zeros(cfg.frames)
    detections: list[list[int]] = []
    for t in range(cfg.trials):
        records = run_trial(cfg, t, scheme)
        for rec in records:
            i = rec.frame - 1
            sq_err[i] += rec.err_norm**2
            if math.isfinite(rec.bound):
                bound_sum[i] += rec.bound
                bound_count[i] += 1
            if rec.realigned:
                detections.append([t, rec.frame])
    per_frame_mse = (sq_err / cfg.trials).tolist()
    with np.errstate(invalid="ignore", divide="ignore"):
        per_frame_bound = np.where(bound_count > 0, bound_sum / np.maximum(bound_count, 1), np.nan)
    ledger = trial_ledger(cfg, scheme)
    return ExperimentSummary(
        scenario={**cfg.to_dict(), "scheme": scheme},
        per_frame_mse=per_frame_mse,
        per_frame_bound=[x if math.isfinite(x) else None for x in per_frame_bound],
        detection_frames=detections,
        ledger={
            "m": ledger.m,
            "pilot_slots": ledger.pilot_slots,
            "solve_cost": ledger.solve_cost,
        },
    )


def trial_ledger(cfg: ScenarioConfig, scheme: str | None = None) -> ComplexityLedger:
    """Per-trial complexity accounting without running the simulation."""
    scheme = cfg.scheme if scheme is None else scheme
    k2 = cfg.k_beams**2
    if scheme == "proposed":
        m, slots = 2, 1
    elif scheme == "abp":
        m, slots = 2, k2
    elif scheme == "codebook":
        m, slots = 2 * k2, k2
    else:
        raise ConfigError(f"unknown scheme {scheme!r}")
    ledger = ComplexityLedger(m=m)
    for _ in range(cfg.frames):
        ledger.tick(slots)
    return ledger


# output emission ----------------------------------------------------


def _fmt(x: float) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    return repr(float(x))


def emit_trace(records: list[FrameRecord], path) -> None:
    """Write per-frame records as CSV with a fixed column order."""
    lines = [TRACE_COLUMNS]
    for r in records:
        lines.append(
            ",".join(
                [
                    str(r.frame),
                    _fmt(r.u_true),
                    _fmt(r.v_true),
                    _fmt(r.u_hat),
                    _fmt(r.v_hat),
                    _fmt(r.err_norm),
                    _fmt(r.err_norm_hat),
                    _fmt(r.p_r),
                    _fmt(r.detected),
                    _fmt(r.realigned),
                    _fmt(r.bound),
                    _fmt(r.innov_norm),
                    _fmt(r.meas_valid),
                ]
            )
        )
    _write_text(path, "\n".join(lines) + "\n")


def emit_summary(summary: ExperimentSummary, path) -> None:
    """Write the aggregate summary as stable JSON."""
    _write_text(path, json.dumps(summary.to_dict(), sort_keys=True, indent=2) + "\n")


def parse_summary(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _write_text(path, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
