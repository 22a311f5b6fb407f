"""Exception hierarchy shared by all meshcast modules."""


class MeshcastError(Exception):
    """Base class for all meshcast errors."""


class ConfigurationError(MeshcastError):
    """Invalid or inconsistent configuration (bad parameter value, bad config file)."""


class UncoverableError(MeshcastError):
    """A neighbor cannot be covered at the requested probability threshold."""


class PlanIntegrityError(MeshcastError):
    """A broadcast plan contains a transmission inconsistent with the sender's schedule."""
