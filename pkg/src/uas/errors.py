"""Exception hierarchy shared across the package."""


class UasError(Exception):
    """Base class for all package errors."""


class ConfigurationError(UasError):
    """Invalid scenario, sweep, or generator parameters (CLI exit code 2)."""


class MapLoadError(UasError):
    """A map file failed to parse or violates a structural invariant."""


class SiteNotFoundError(UasError):
    """A site lookup or filtered query matched nothing."""


class ProjectionError(UasError):
    """A position falls outside the projectable region."""


class DataIntegrityError(UasError):
    """Emitted or loaded data violates an internal consistency guarantee."""


class ProcessingError(UasError):
    """Raw scenario output is missing or malformed during post-processing."""
