"""Exception types shared across the package."""

from __future__ import annotations


class GridFormatError(ValueError):
    """A grid description is malformed or violates a structural rule."""


class FlowUndefinedError(RuntimeError):
    """Tree current flow is not defined for this switch configuration.

    Raised when a component of the closed-switch graph has no feeder,
    more than one feeder, or contains a cycle.
    """


class VariableGuardError(RuntimeError):
    """An exhaustive operation was asked to enumerate too many variables."""
