"""Exception types raised by the gsr package."""


class GsrError(Exception):
    """Base class for all errors raised by this package."""


class GraphConnectivityError(GsrError):
    """A generated or loaded graph is disconnected where connectivity is required."""


class DataFormatError(GsrError):
    """A data file (edge list, coordinates, station CSV) violates its format."""


class ConfigError(GsrError):
    """An experiment configuration is malformed or inconsistent."""


class SingularSystemError(GsrError):
    """A linear system that must be solved exactly is singular."""


class SolverError(GsrError):
    """An optimization solver failed to converge or returned an unusable result."""


class IllConditionedError(GsrError):
    """A matrix is too ill-conditioned for the requested operation."""
