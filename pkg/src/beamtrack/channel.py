"""LOS channel synthesis, received snapshots, and beamforming.

The channel between the N_x x N_y ground array and the single-antenna UAV
is rank one: H = (rho_pl * alpha / D^beta) * a_x(u) a_y(v)^H.  The default
scenario runs a unit link budget (rho_pl = 1, beta = 0, D = 1) and controls
the noise level directly through a quoted SNR.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import SpatialState


@dataclass(frozen=True)
class ArrayConfig:
    """Uniform planar array dimensions."""

    n_x: int
    n_y: int

    def __post_init__(self):
        if self.n_x < 2 or self.n_y < 2:
            raise ValueError("monopulse extraction needs at least 2 elements per axis")

    @property
    def n(self) -> int:
        return self.n_x * self.n_y


@dataclass(frozen=True)
class ChannelRealization:
    """One frame's channel parameters."""

    gain: complex               # alpha
    spatial: SpatialState
    path_loss_gain: float = 1.0  # rho_pl
    path_loss_exponent: float = 0.0  # beta
    distance: float = 1.0       # D, meters

    def __post_init__(self):
        if self.distance <= 0:
            raise ValueError("distance must be positive")

    @property
    def scalar_gain(self) -> complex:
        """The common complex factor rho_pl * alpha / D^beta."""
        return self.path_loss_gain * self.gain / self.distance**self.path_loss_exponent


@dataclass(frozen=True)
class PilotConfig:
    """Pilot/data symbols and the quoted SNR.

    snr_reference selects how the quoted SNR maps to per-element noise
    variance given the per-element signal power |H(n,m) s|^2:

    - "element": sigma^2 = |H s|^2 / SNR (per-element received SNR)
    - "array":   sigma^2 = |H s|^2 / (N * SNR); the quoted SNR is referenced
      to the aggregate array signal energy, which is the convention that
      reproduces the measurement-noise magnitudes of the reference results.
    """

    snr_db: float
    pilot_symbol: complex = 1.0 + 0.0j
    data_symbol: complex = 1.0 + 0.0j
    slot_length: float = 1.0    # T_s, seconds
    snr_reference: str = "array"

    def __post_init__(self):
        if not np.isclose(abs(self.pilot_symbol), 1.0):
            raise ValueError("pilot symbol must be unit modulus")
        if not np.isclose(abs(self.data_symbol), 1.0):
            raise ValueError("data symbol must be unit modulus")
        if self.snr_reference not in ("element", "array"):
            raise ValueError("snr_reference must be 'element' or 'array'")

    def noise_variance(self, element_signal_power: float, n_elements: int) -> float:
        """Per-element complex noise variance implied by the quoted SNR."""
        snr_lin = 10.0 ** (self.snr_db / 10.0)
        var = element_signal_power / snr_lin
        if self.snr_reference == "array":
            var /= n_elements
        return var


def steering_vector(u: float, n: int) -> np.ndarray:
    """Array response along one axis: element i is exp(-1j * i * u)."""
    if n < 1:
        raise ValueError("need at least one element")
    return np.exp(-1j * u * np.arange(n))


def channel_matrix(c: ChannelRealization, arr: ArrayConfig) -> np.ndarray:
    """Rank-one channel H = scalar_gain * a_x(u) a_y(v)^H, shape (n_x, n_y)."""
    ax = steering_vector(c.spatial.u, arr.n_x)
    ay = steering_vector(c.spatial.v, arr.n_y)
    return c.scalar_gain * np.outer(ax, ay.conj())


def evolve_gain(
    alpha: complex,
    rho: float,
    rng: np.random.Generator,
    innovation_var: float | None = None,
) -> complex:
    """First-order Gauss-Markov step for the channel gain.

    innovation_var defaults to the literal (1 - rho^2 / 2) of the source
    model.  That normalization does not vanish at rho = 1, which is unusual
    for a Gauss-Markov process; pass an explicit value to override.
    """
    if abs(rho) > 1:
        raise ValueError("|rho| must not exceed 1")
    if innovation_var is None:
        innovation_var = 1.0 - rho**2 / 2.0
    if innovation_var < 0:
        raise ValueError("innovation variance must be non-negative")
    scale = np.sqrt(innovation_var / 2.0)
    eps = complex(rng.normal(0.0, scale) + 1j * rng.normal(0.0, scale)) if scale > 0 else 0.0
    return rho * alpha + eps


def complex_noise(shape, variance: float, rng: np.random.Generator) -> np.ndarray:
    """Circularly-symmetric complex Gaussian noise with total variance per entry."""
    if variance == 0.0:
        return np.zeros(shape, dtype=complex)
    s = np.sqrt(variance / 2.0)
    return rng.normal(0.0, s, shape) + 1j * rng.normal(0.0, s, shape)


def synthesize_rx(
    h: np.ndarray,
    pilot: PilotConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Pilot-phase snapshot Y = H s + N with SNR-calibrated element noise."""
    signal = h * pilot.pilot_symbol
    element_power = float(np.mean(np.abs(signal) ** 2))
    var = pilot.noise_variance(element_power, h.size)
    return signal + complex_noise(h.shape, var, rng)


def beamforming_weight(est: SpatialState, arr: ArrayConfig) -> np.ndarray:
    """Unit-norm conjugate-steering weight toward the estimated direction.

    Returns vec(w_x w_y^H) of length N; vec() is row-major over (x, y).
    """
    wx = steering_vector(est.u, arr.n_x) / np.sqrt(arr.n_x)
    wy = steering_vector(est.v, arr.n_y) / np.sqrt(arr.n_y)
    return np.outer(wx, wy.conj()).ravel()


def vec_channel(h: np.ndarray) -> np.ndarray:
    """Flatten a channel matrix with the same convention as beamforming_weight."""
    return h.ravel()


def beamformed_signal(
    w: np.ndarray,
    h_vec: np.ndarray,
    pilot: PilotConfig,
    rng: np.random.Generator,
    symbol: complex | None = None,
) -> complex:
    """Data-phase combiner output r = w^H h s_d + w^H n.

    The combiner is unit norm, so the noise term keeps the per-element
    variance.
    """
    s = pilot.data_symbol if symbol is None else symbol
    element_power = float(np.mean(np.abs(h_vec * s) ** 2))
    var = pilot.noise_variance(element_power, h_vec.size)
    n = complex_noise(h_vec.shape, var, rng)
    return complex(np.vdot(w, h_vec) * s + np.vdot(w, n))
