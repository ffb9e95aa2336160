"""Exception types shared across the tracking library."""


class BeamtrackError(Exception):
    """Base class for library-specific failures."""


class MeasurementFailure(BeamtrackError):
    """No usable measurement could be formed for the current frame.

    Trackers fall back to a prediction-only update when they see this.
    """


class DegenerateInputError(BeamtrackError):
    """An input is structurally unusable (e.g. an all-zero snapshot)."""


class ConfigError(BeamtrackError):
    """A scenario configuration is invalid or inconsistent."""
