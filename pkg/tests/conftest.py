"""Shared fixtures and snapshot builders for the test suite."""

import numpy as np
import pytest

from beamtrack.channel import ArrayConfig, ChannelRealization, channel_matrix
from beamtrack.geometry import SpatialState


def rank1_snapshot(u: float, v: float, arr: ArrayConfig, gain: complex = 1.0 + 0.0j) -> np.ndarray:
    """Noiseless channel snapshot (unit pilot symbol) at spatial angles (u, v)."""
    chan = ChannelRealization(gain=gain, spatial=SpatialState(u, v))
    return channel_matrix(chan, arr)


@pytest.fixture
def arr8() -> ArrayConfig:
    return ArrayConfig(8, 8)


@pytest.fixture
def arr4() -> ArrayConfig:
    return ArrayConfig(4, 4)
