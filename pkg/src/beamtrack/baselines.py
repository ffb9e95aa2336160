"""Comparison trackers: codebook-beamforming EKF and auxiliary-beam-pair EKF.

Both baselines measure beamformed pilot observations instead of the raw
snapshot.  The codebook tracker stacks real/imag parts of all K^2 beam
outputs (measurement dimension 2*K^2); the auxiliary-beam-pair (ABP)
tracker forms a gain-invariant power-ratio metric around the codebook beam
nearest the prediction (measurement dimension 2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ArrayConfig, PilotConfig, steering_vector
from .ekf import TrackerState, predict, _symmetrize
from .errors import MeasurementFailure
from .geometry import SpatialState

# Half the 3dB beamwidth in spatial-angle units; the standard squint for
# amplitude-comparison monopulse.
ABP_SQUINT_FACTOR = 0.445 * np.pi

_POWER_FLOOR = 1e-30


@dataclass(frozen=True)
class Codebook:
    """Uniform spatial-angle beam grid with K beams per axis."""

    k: int
    axis_angles: np.ndarray     # (K,), strictly increasing over [-pi, pi)
    beam_angles: np.ndarray     # (K^2, 2) (u, v) pairs, x-major
    weights: np.ndarray         # (N, K^2), unit-norm columns
    arr: ArrayConfig

    @property
    def m_dim(self) -> int:
        return 2 * self.k**2

    def nearest_axis_angle(self, angle: float) -> float:
        return float(self.axis_angles[np.argmin(np.abs(self.axis_angles - angle))])


def build_codebook(k: int, arr: ArrayConfig) -> Codebook:
    """DFT-style grid: K uniformly spaced spatial angles per axis."""
    if k < 1:
        raise ValueError("codebook needs at least one beam per axis")
    axis = -np.pi + 2.0 * np.pi * np.arange(k) / k
    pairs = []
    cols = []
    for u in axis:
        wx = steering_vector(u, arr.n_x) / np.sqrt(arr.n_x)
        for v in axis:
            wy = steering_vector(v, arr.n_y) / np.sqrt(arr.n_y)
            pairs.append((u, v))
            cols.append(np.outer(wx, wy.conj()).ravel())
    return Codebook(
        k=k,
        axis_angles=axis,
        beam_angles=np.array(pairs),
        weights=np.array(cols).T,
        arr=arr,
    )


def _response_vec(x: np.ndarray, arr: ArrayConfig) -> np.ndarray:
    ax = steering_vector(x[0], arr.n_x)
    ay = steering_vector(x[1], arr.n_y)
    return np.outer(ax, ay.conj()).ravel()


def _response_grad(x: np.ndarray, arr: ArrayConfig) -> tuple[np.ndarray, np.ndarray]:
    """d vec(a_x a_y^H) / du and / dv."""
    ax = steering_vector(x[0], arr.n_x)
    ay = steering_vector(x[1], arr.n_y)
    dax = -1j * np.arange(arr.n_x) * ax
    day = -1j * np.arange(arr.n_y) * ay
    du = np.outer(dax, ay.conj()).ravel()
    # conj of a_y picks up +j*m
    dv = np.outer(ax, (day.conj())).ravel()
    return du, dv


def _stack_reim(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag])


def codebook_measurement(
    y_vec: np.ndarray,
    codebook: Codebook,
) -> np.ndarray:
    """Beamform the pilot snapshot on every codebook beam; stack re/im."""
    obs = codebook.weights.conj().T @ y_vec
    return _stack_reim(obs)


def codebook_predicted(
    x_pred: np.ndarray,
    codebook: Codebook,
    gain: complex,
    symbol: complex,
) -> np.ndarray:
    """Noiseless beam observations at the predicted state."""
    obs = gain * symbol * (codebook.weights.conj().T @ _response_vec(x_pred, codebook.arr))
    return _stack_reim(obs)


def codebook_jacobian(
    x_pred: np.ndarray,
    codebook: Codebook,
    gain: complex = 1.0 + 0.0j,
    symbol: complex = 1.0 + 0.0j,
) -> np.ndarray:
    """Analytic (2K^2 x 2) Jacobian of the noiseless beam responses."""
    du, dv = _response_grad(x_pred, codebook.arr)
    col_u = gain * symbol * (codebook.weights.conj().T @ du)
    col_v = gain * symbol * (codebook.weights.conj().T @ dv)
    return np.column_stack([_stack_reim(col_u), _stack_reim(col_v)])


class CodebookTracker:
    """EKF over the stacked codebook beam observations.

    The complex channel gain is not observable to the tracker; it uses the
    conditional mean rho^k * alpha_0 as the predicted gain and folds the
    residual gain uncertainty isotropically into its measurement
    covariance (gain_uncertainty_var scaled by the mean beam power).
    """

    def __init__(
        self,
        codebook: Codebook,
        f: np.ndarray,
        q_p: np.ndarray,
        pilot: PilotConfig,
        state: TrackerState,
        gain_rho: float = 1.0,
        alpha0: complex = 1.0 + 0.0j,
        gain_uncertainty_var: float = 0.0,
    ):
        self.codebook = codebook
        self.f = f
        self.q_p = q_p
        self.pilot = pilot
        self.state = state
        self.gain_rho = gain_rho
        self.alpha_pred = complex(alpha0)
        self.gain_uncertainty_var = gain_uncertainty_var
        self.m_dim = codebook.m_dim
        self.pilot_slots_per_frame = codebook.k**2

        n = codebook.arr.n
        # per-component noise variance of the stacked re/im observations;
        # DFT beams are near-orthonormal so the diagonal is exact enough
        sigma2 = pilot.noise_variance(1.0, n)
        inflate = 0.5 * gain_uncertainty_var * n / codebook.k**2
        self.q_n = (sigma2 / 2.0 + inflate) * np.eye(self.m_dim)

    def step(self, y_vec: np.ndarray) -> dict:
        self.alpha_pred *= self.gain_rho
        pred = predict(self.state, self.f, self.q_p)
        z = codebook_measurement(y_vec, self.codebook)
        z_hat = codebook_predicted(
            pred.x, self.codebook, self.alpha_pred, self.pilot.pilot_symbol
        )
        g = codebook_jacobian(
            pred.x, self.codebook, self.alpha_pred, self.pilot.pilot_symbol
        )
        innovation = z - z_hat
        s = g @ pred.p @ g.T + self.q_n
        k = np.linalg.solve(s.T, (pred.p @ g.T).T).T
        x_new = pred.x + k @ innovation
        p_new = _symmetrize(pred.p - k @ s @ k.T)
        self.state = TrackerState(x=x_new, p=p_new)
        return {
            "state": self.state,
            "innovation_norm": float(np.linalg.norm(innovation)),
            "meas_valid": True,
            "kalman_gain": k,
            "g_mat": g,
        }

    def reinitialize(self, state: TrackerState):
        self.state = state


@dataclass(frozen=True)
class BeamPairConfig:
    """Squinted beam pair around a codebook center beam."""

    offset: float               # delta, radians of spatial angle

    def __post_init__(self):
        if self.offset <= 0:
            raise ValueError("squint offset must be positive")

    @staticmethod
    def for_array(n_x: int) -> "BeamPairConfig":
        return BeamPairConfig(offset=ABP_SQUINT_FACTOR / n_x)


def _axis_pair_powers(
    u: float, center: float, delta: float, n: int
) -> tuple[float, float]:
    """Noiseless powers of the +/- squinted axis beams at spatial angle u."""
    def power(c):
        w = steering_vector(c, n) / np.sqrt(n)
        return abs(np.vdot(w, steering_vector(u, n))) ** 2

    return power(center + delta), power(center - delta)


def abp_ratio_curve(u: float, center: float, delta: float, n: int) -> float:
    """Noiseless ratio metric zeta(u) for one axis; lies in [-1, 1]."""
    p_plus, p_minus = _axis_pair_powers(u, center, delta, n)
    total = p_plus + p_minus
    if total < _POWER_FLOOR:
        raise MeasurementFailure("both squinted-beam powers below floor")
    return (p_plus - p_minus) / total


def abp_ratio_metric(
    y_vec: np.ndarray,
    center: SpatialState,
    pair: BeamPairConfig,
    arr: ArrayConfig,
) -> np.ndarray:
    """Measured 2-vector [zeta_u, zeta_v] from the shared pilot snapshot."""
    zetas = []
    for axis in ("u", "v"):
        obs2 = []
        for sign in (1.0, -1.0):
            if axis == "u":
                est = SpatialState(center.u + sign * pair.offset, center.v)
            else:
                est = SpatialState(center.u, center.v + sign * pair.offset)
            wx = steering_vector(est.u, arr.n_x) / np.sqrt(arr.n_x)
            wy = steering_vector(est.v, arr.n_y) / np.sqrt(arr.n_y)
            w = np.outer(wx, wy.conj()).ravel()
            obs2.append(abs(np.vdot(w, y_vec)) ** 2)
        p_plus, p_minus = obs2
        total = p_plus + p_minus
        if total < _POWER_FLOOR:
            raise MeasurementFailure("both squinted-beam powers below floor")
        zetas.append((p_plus - p_minus) / total)
    return np.array(zetas)


class AbpTracker:
    """EKF over the auxiliary-beam-pair ratio metric.

    The ratio metric is exactly invariant to the complex channel gain, so
    no gain model is needed.  The Jacobian is a central difference of the
    noiseless ratio curve.  The measurement covariance propagates the
    known element-noise variance through the beam powers ("delta" mode,
    the default); "fixed" mode uses the flat sigma_n^2 * I_2 instead.
    """

    _FD_STEP = 1e-5

    def __init__(
        self,
        codebook: Codebook,
        pair: BeamPairConfig,
        f: np.ndarray,
        q_p: np.ndarray,
        pilot: PilotConfig,
        state: TrackerState,
        sigma_n_sq: float = 5e-6,
        q_n_source: str = "delta",
        q_n_floor: float = 1e-8,
    ):
        if q_n_source not in ("fixed", "delta"):
            raise ValueError("q_n_source must be 'fixed' or 'delta'")
        self.codebook = codebook
        self.pair = pair
        self.f = f
        self.q_p = q_p
        self.pilot = pilot
        self.state = state
        self.sigma_n_sq = sigma_n_sq
        self.q_n_source = q_n_source
        self.q_n_floor = q_n_floor
        self.arr = codebook.arr
        self.m_dim = 2
        self.pilot_slots_per_frame = codebook.k**2

    def _center(self, x_pred: np.ndarray) -> SpatialState:
        return SpatialState(
            self.codebook.nearest_axis_angle(x_pred[0]),
            self.codebook.nearest_axis_angle(x_pred[1]),
        )

    def _predicted(self, x: np.ndarray, center: SpatialState) -> np.ndarray:
        return np.array([
            abp_ratio_curve(x[0], center.u, self.pair.offset, self.arr.n_x),
            abp_ratio_curve(x[1], center.v, self.pair.offset, self.arr.n_y),
        ])

    def _jacobian(self, x_pred: np.ndarray, center: SpatialState) -> np.ndarray:
        h = self._FD_STEP
        g = np.zeros((2, 2))
        for i in range(2):
            xp = x_pred.copy()
            xm = x_pred.copy()
            xp[i] += h
            xm[i] -= h
            g[:, i] = (self._predicted(xp, center) - self._predicted(xm, center)) / (2 * h)
        return g

    def _q_n(self, x_pred: np.ndarray, center: SpatialState) -> np.ndarray:
        """Delta-method variance of each ratio; gain magnitude cancels."""
        sigma2 = self.pilot.noise_variance(1.0, self.arr.n)
        variances = []
        for axis_val, c, n_axis, n_other in (
            (x_pred[0], center.u, self.arr.n_x, self.arr.n_y),
            (x_pred[1], center.v, self.arr.n_y, self.arr.n_x),
        ):
            p_plus, p_minus = _axis_pair_powers(axis_val, c, self.pair.offset, n_axis)
            # cross-axis pattern scales both powers; it cancels in zeta but
            # sets the per-beam signal level seen against the element noise
            p_plus *= n_other
            p_minus *= n_other
            total = p_plus + p_minus
            var_p = 2.0 * sigma2 * p_plus + sigma2**2
            var_m = 2.0 * sigma2 * p_minus + sigma2**2
            dzp = 2.0 * p_minus / total**2
            dzm = 2.0 * p_plus / total**2
            variances.append(max(dzp**2 * var_p + dzm**2 * var_m, self.q_n_floor))
        return np.diag(variances)

    def step(self, y_vec: np.ndarray) -> dict:
        pred = predict(self.state, self.f, self.q_p)
        center = self._center(pred.x)
        try:
            zeta = abp_ratio_metric(y_vec, center, self.pair, self.arr)
            z_hat = self._predicted(pred.x, center)
        except MeasurementFailure:
            self.state = pred
            return {
                "state": pred,
                "innovation_norm": float("nan"),
                "meas_valid": False,
                "kalman_gain": np.zeros((2, 2)),
                "g_mat": np.zeros((2, 2)),
            }
        g = self._jacobian(pred.x, center)
        if self.q_n_source == "fixed":
            q_n = self.sigma_n_sq * np.eye(2)
        else:
            q_n = self._q_n(pred.x, center)
        innovation = zeta - z_hat
        s = g @ pred.p @ g.T + q_n
        k = np.linalg.solve(s.T, (pred.p @ g.T).T).T
        x_new = pred.x + k @ innovation
        p_new = _symmetrize(pred.p - k @ s @ k.T)
        self.state = TrackerState(x=x_new, p=p_new)
        return {
            "state": self.state,
            "innovation_norm": float(np.linalg.norm(innovation)),
            "meas_valid": True,
            "kalman_gain": k,
            "g_mat": g,
        }

    def reinitialize(self, state: TrackerState):
        self.state = state
