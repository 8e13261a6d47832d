"""Exception taxonomy shared across the package.

The three classes map one-to-one onto CLI exit codes: bad input is the
caller's problem (exit 1), an internal inconsistency means the counting
pipeline disagrees with itself (exit 2), and a resource refusal means the
request is too large to honour rather than wrong (exit 3).
"""

__all__ = ["OrbitAdjError", "InputError", "InconsistencyError", "ResourceCapError"]


class OrbitAdjError(Exception):
    """Base class for all package-raised errors."""


class InputError(OrbitAdjError):
    """Malformed input or invalid arguments (CLI exit code 1)."""


class InconsistencyError(OrbitAdjError):
    """Internal cross-check failed; results cannot be trusted (CLI exit code 2)."""


class ResourceCapError(OrbitAdjError):
    """Request exceeds a documented size cap (CLI exit code 3)."""
