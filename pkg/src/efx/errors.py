"""Exception types shared across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Malformed or inadmissible user input (bad JSON, ragged matrix, wrong agent count)."""


class GuardError(InputError):
    """An exhaustive-search request exceeds the configured good-count guard."""


class ContractError(ValueError):
    """A caller violated a documented precondition (e.g. asked for a cut of a non-champion)."""


class SolverDefectError(RuntimeError):
    """An internal invariant of the allocation procedure failed.

    This is never expected on valid input; it indicates a bug, so the partial
    step trace is attached to aid debugging.
    """

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []
