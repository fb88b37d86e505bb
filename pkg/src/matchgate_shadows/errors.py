"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes (usage 2, data 3, resource 4,
verification failure 5); library code raises them directly.
"""


class MatchgateShadowsError(Exception):
    """Base class for all package errors."""


class DomainError(MatchgateShadowsError, ValueError):
    """An argument violates a documented precondition."""


class DataError(MatchgateShadowsError):
    """A file or serialized payload is malformed or inconsistent."""


class ResourceError(MatchgateShadowsError):
    """A size cap protecting memory/runtime was exceeded."""


class NumericError(MatchgateShadowsError):
    """A numerical routine failed to converge to the requested accuracy."""


class InternalError(MatchgateShadowsError):
    """An internal consistency check failed (a bug, not a user error)."""
