from typing import List, Optional


class GeodesicError(Exception):
    """Base class for every error raised by the solver library"""


class DomainError(GeodesicError, ValueError):
    """A parameter left a non-periodic domain or a knot range"""

    def __init__(self, message: str, index: Optional[int] = None):
        super().__init__(message)
        self.index = index


class ContractError(GeodesicError, ValueError):
    """Inputs violate a structural contract (sizes, modes, invariants)"""


class SingularityError(GeodesicError):
    """The surface metric is degenerate at a sample"""

    def __init__(self, message: str, sample: Optional[float] = None):
        super().__init__(message)
        self.sample = sample


class DegenerateTangentError(GeodesicError):
    """A tangent vector vanished where an angle was requested"""


class InputError(GeodesicError, ValueError):
    """Scene file or command-line input is invalid"""


class ConvergenceError(GeodesicError):
    """No candidate (or brute-force pair) produced a converged solution"""

    def __init__(self, message: str, diagnostics: Optional[List[dict]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []

    @property
    def trim_failure(self) -> bool:
        """True when every failed attempt was stopped by the trimming loop"""
        return bool(self.diagnostics) and all(d.get('trim_failed', False) for d in self.diagnostics)
