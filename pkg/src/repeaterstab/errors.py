"""Exception hierarchy shared by all modules."""


class RepeaterError(Exception):
    """Base class for errors raised by :mod:`repeaterstab`."""


class InvalidInputError(RepeaterError, ValueError):
    """An argument violates a documented precondition."""


class DimensionError(InvalidInputError):
    """A matrix or vector has the wrong shape."""


class BracketError(RepeaterError):
    """A root bracket does not contain a sign change."""


class DegenerateDeploymentError(InvalidInputError):
    """Two repeaters occupy the same position."""


class StructureError(InvalidInputError):
    """An operation needs a deployment with a specific structure (e.g. an odd ring)."""


class ConfigurationError(InvalidInputError):
    """A simulation or scenario configuration is inconsistent."""
