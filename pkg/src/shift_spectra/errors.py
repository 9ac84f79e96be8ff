"""Exception hierarchy and warning category for shift-spectra."""

from typing import Any


class SpectraError(Exception):
    """Base class for all shift-spectra errors."""


class ConfigError(SpectraError):
    """Raised when a system config, run config or observable spec is invalid."""


class EngineError(SpectraError):
    """Raised when an engine precondition does not hold."""


class InadmissibleWordError(EngineError):
    """Raised when a word uses a transition forbidden by the adjacency matrix."""

    def __init__(self, message: str, word: tuple[int, ...]) -> None:
        super().__init__(message)
        self.word = word


class PoleHitError(EngineError):
    """Raised when a rational function is evaluated exactly at one of its poles."""

    def __init__(self, message: str, order: int, residue: Any = None) -> None:
        super().__init__(message)
        self.order = order
        self.residue = residue


class DegeneracyError(EngineError):
    """Raised when repeated diagonal eigenvalues would need Jordan logic."""


class TruncationError(EngineError):
    """Raised when a tensor truncation is too small for the requested result."""


class ObservableKindError(EngineError):
    """Raised when an observable does not belong to the system's test space."""


class CrossCheckError(EngineError):
    """Raised when two independent computations of the same object disagree."""


class NotASquareError(EngineError):
    """Raised when an exact square root does not exist in the scalar field."""


class SpectrumWarning(UserWarning):
    """Non-fatal conditions: projections off the spectrum, unstable truncations."""
