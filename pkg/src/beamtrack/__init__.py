"""EKF beam tracking with complex-comparison monopulse measurements."""

from .channel import ArrayConfig, ChannelRealization, PilotConfig
from .ekf import EkfNoiseConfig, TrackerState
from .geometry import FlightGeometry, ProcessNoise, SpatialState
from .harness import ScenarioConfig, run_experiment, run_trial
from .misalign import DetectConfig
from .monopulse import MonopulseMeasurement

__all__ = [
    "ArrayConfig",
    "ChannelRealization",
    "DetectConfig",
    "EkfNoiseConfig",
    "FlightGeometry",
    "MonopulseMeasurement",
    "PilotConfig",
    "ProcessNoise",
    "ScenarioConfig",
    "SpatialState",
    "TrackerState",
    "run_experiment",
    "run_trial",
]

__version__ = "0.1.0"
