"""Recursive mean-square-error upper bound for the tracking filter.

The bound propagates the filter's own covariance through the error
dynamics with a relaxed measurement covariance Q_n' > Q_n; the relaxation
absorbs the neglected linearization remainder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BoundConfig:
    """Relaxed measurement covariance and remainder handling."""

    q_n_relaxed: np.ndarray
    neglect_remainder: bool = True

    def __post_init__(self):
        object.__setattr__(self, "q_n_relaxed", np.asarray(self.q_n_relaxed, dtype=float))


def bound_step(
    p_prev: np.ndarray,
    k: np.ndarray,
    g: np.ndarray,
    f: np.ndarray,
    q_p: np.ndarray,
    q_n_relaxed: np.ndarray,
) -> float:
    """One-frame MSE bound Tr(A P A^T) + Tr(B Q_p B^T) + Tr(K Q_n' K^T)
    with A = (I - K G) F and B = (I - K G)."""
    b = np.eye(k.shape[0]) - k @ g
    a = b @ f
    return float(
        np.trace(a @ p_prev @ a.T)
        + np.trace(b @ q_p @ b.T)
        + np.trace(k @ q_n_relaxed @ k.T)
    )


def bound_gap(k: np.ndarray, q_n_relaxed: np.ndarray, q_n: np.ndarray) -> float:
    """Bound-to-MSE gap contribution Tr(K (Q_n' - Q_n) K^T) >= 0."""
    diff = np.asarray(q_n_relaxed, dtype=float) - np.asarray(q_n, dtype=float)
    return float(np.trace(k @ diff @ k.T))
