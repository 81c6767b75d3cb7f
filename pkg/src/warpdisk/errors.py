"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class EvaluationError(RuntimeError):
    """A density or weight produced non-finite values."""


class QuadratureError(RuntimeError):
    """Numerical integration failed to reach the requested tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class GeodesicSolverError(RuntimeError):
    """Clairaut root bracketing failed; carries the scanned constant profile."""

    def __init__(self, message, scanned=None):
        super().__init__(message)
        self.scanned = scanned


class ZeroRegionError(ValueError):
    """A candidate isoperimetric region is degenerate (zero area/boundary)."""


class InvalidCurveError(ValueError):
    """A polyline violates the Jordan-curve requirements (self-intersection...)."""


class MeshError(ValueError):
    """A triangulation is inconsistent or contains degenerate triangles."""


class BranchCutError(ValueError):
    """A conformal map was evaluated on its branch cut."""


class ContractionError(RuntimeError):
    """The boundary-correspondence iteration failed to contract."""

    def __init__(self, message, residual_history=None):
        super().__init__(message)
        self.residual_history = residual_history or []


class ConfigError(ValueError):
    """A run configuration is malformed (unknown keys, bad values)."""
