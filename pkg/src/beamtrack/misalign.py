"""Beamformed-power error estimation and misalignment detection.

The normalized received power after beamforming follows the planar-array
pattern; within the main lobe it is well approximated by
cos^4(N_x ||xi|| / 4) where xi is the angle estimation error.  Inverting
that approximation over a grid gives a real-time error-norm estimate; a
threshold crossing triggers mechanical realignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ArrayConfig
from .geometry import SpatialState


@dataclass(frozen=True)
class DetectConfig:
    """Grid, threshold, and realignment parameters for an n_x-element axis."""

    grid_step: float            # Delta
    grid_max: float             # gamma, below the first null 2*pi/N_x
    threshold: float            # p_th, radians of error norm
    consecutive_required: int = 1
    residual_after_realign: float = 0.02
    coarse_range: float = np.pi / 6.0   # theta_a
    enabled: bool = True

    def __post_init__(self):
        if not (0 < self.grid_step < self.grid_max):
            raise ValueError("need 0 < grid_step < grid_max")
        if self.threshold > self.grid_max:
            raise ValueError("threshold must not exceed grid_max")
        if self.consecutive_required < 1:
            raise ValueError("consecutive_required must be >= 1")

    @staticmethod
    def for_array(n_x: int, **overrides) -> "DetectConfig":
        """Defaults: Delta = (2pi/N_x)/1000, gamma = 0.95*(2pi/N_x),
        threshold = 3dB beamwidth 0.89*pi/N_x."""
        null = 2.0 * np.pi / n_x
        kw = dict(
            grid_step=null / 1000.0,
            grid_max=0.95 * null,
            threshold=0.89 * np.pi / n_x,
        )
        kw.update(overrides)
        return DetectConfig(**kw)


@dataclass(frozen=True)
class ErrorEstimate:
    """Per-frame detector output."""

    xi_hat: float
    p_r: float
    detected: bool
    realigned: bool
    clipped: bool = False


@dataclass
class DetectorState:
    """Consecutive-detection counter, owned by one trial."""

    consecutive: int = 0


def _dirichlet_ratio(offset: float, n: int) -> float:
    """sin(n*t/2)/sin(t/2) with the removable singularities filled in."""
    den = np.sin(offset / 2.0)
    if den == 0.0:
        return float(n * np.cos(n * offset / 2.0))
    return float(np.sin(n * offset / 2.0) / den)


def received_power(x: SpatialState, est: SpatialState, arr: ArrayConfig) -> float:
    """Normalized beam-pattern power at offset (u-u_hat, v-v_hat); 1 at zero offset."""
    gx = _dirichlet_ratio(x.u - est.u, arr.n_x) / arr.n_x
    gy = _dirichlet_ratio(x.v - est.v, arr.n_y) / arr.n_y
    return float(gx**2 * gy**2)


def approx_power(xi_norm: float, n_x: int) -> float:
    """Main-lobe approximation cos^4(n_x * ||xi|| / 4) for a square array."""
    if not (0 <= xi_norm <= 2.0 * np.pi / n_x):
        raise ValueError("error norm outside the main lobe")
    return float(np.cos(n_x * xi_norm / 4.0) ** 4)


def _grid(cfg: DetectConfig) -> np.ndarray:
    return np.arange(0.0, cfg.grid_max + cfg.grid_step / 2.0, cfg.grid_step)


def estimate_error_norm(
    p_r: float,
    cfg: DetectConfig,
    n_x: int,
    n_y: int | None = None,
) -> float:
    """Grid inversion of the power approximation; ties go to the smaller norm.

    For rectangular arrays (n_y != n_x) the search extends over the 2-D
    error grid on a coarser mesh.
    """
    if p_r < 0:
        raise ValueError("power must be non-negative")
    p = min(p_r, 1.0)
    if n_y is None or n_y == n_x:
        grid = _grid(cfg)
        vals = np.cos(n_x * grid / 4.0) ** 4
        return float(grid[np.argmin(np.abs(p - vals))])
    step = max(cfg.grid_step, cfg.grid_max / 200.0)
    axis = np.arange(0.0, cfg.grid_max + step / 2.0, step)
    gx, gy = np.meshgrid(axis, axis, indexing="ij")
    vals = np.cos(n_x * gx / 4.0) ** 2 * np.cos(n_y * gy / 4.0) ** 2
    err = np.abs(p - vals)
    norms = np.hypot(gx, gy)
    # smallest norm among (near-)minimal fits
    near = err <= err.min() + 1e-15
    return float(norms[near].min())


def detect_step(
    p_r: float,
    cfg: DetectConfig,
    arr: ArrayConfig,
    det: DetectorState,
) -> ErrorEstimate:
    """One detection step; mutates the consecutive counter.

    realigned=True means the caller must re-center the truth, re-initialize
    the tracker, and reset its own bookkeeping; the counter resets here.
    """
    clipped = p_r > 1.0
    xi_hat = estimate_error_norm(p_r, cfg, arr.n_x, arr.n_y)
    detected = bool(cfg.enabled and xi_hat > cfg.threshold)
    if detected:
        det.consecutive += 1
    else:
        det.consecutive = 0
    realigned = det.consecutive >= cfg.consecutive_required
    if realigned:
        det.consecutive = 0
    return ErrorEstimate(
        xi_hat=xi_hat,
        p_r=float(p_r),
        detected=detected,
        realigned=realigned,
        clipped=clipped,
    )
