"""Error taxonomy shared by every module.

Callers that feed bad arguments get ParameterError, geometry/aliasing
violations get DomainError, blown budgets get ResourceError.  Fit and
estimation failures are separate so the CLI can map them to exit codes.
"""


class FrostlabError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(FrostlabError, ValueError):
    """An argument is outside its contract (wrong range, wrong shape)."""


class DomainError(FrostlabError):
    """Geometry or sampling preconditions violated (box too small, aliasing)."""


class ResourceError(FrostlabError):
    """A size cap would be exceeded (atom counts, Cantor depth, grid memory)."""


class FitError(FrostlabError):
    """Too few usable samples for a requested fit."""


class EstimationError(FrostlabError):
    """An estimator could not produce a certified value (e.g. all-zero witnesses)."""


class ConfigError(FrostlabError):
    """Invalid run configuration; carries the offending field path."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")
