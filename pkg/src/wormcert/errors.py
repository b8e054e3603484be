"""Exception hierarchy shared by all modules."""


class WormError(Exception):
    """Base class for every error raised by this package."""


class ChartError(WormError, ValueError):
    """A point with z = 0 was passed where the defining functions are undefined."""


class ProfileError(WormError):
    """A profile could not be built or failed validation."""


class QuadratureError(WormError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, achieved):
        super().__init__(f"{message} (achieved error estimate {achieved:.3e})")
        self.achieved = achieved


class SearchError(WormError):
    """A parameter search found no admissible value."""


class ConfigError(WormError):
    """Invalid user configuration (CLI flags, profile file)."""
