"""Exception types shared across the package."""


class HdpcaError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(HdpcaError):
    """Requested dimension is outside the family's supported range."""


class UndefinedSphericityError(HdpcaError):
    """Sphericity is undefined because the eigenvalue tail is all zero."""


class InvalidIndexError(HdpcaError):
    """An eigenvalue/eigenvector index is out of range for the operation."""


class UnsupportedEigenvectorError(HdpcaError):
    """The family does not track an analytic eigenvector at this index."""


class InvalidMatrixError(HdpcaError):
    """Matrix input violates a structural requirement (e.g. symmetry)."""


class RankDeficiencyError(HdpcaError):
    """A requested component falls below the numerical rank threshold."""


class UnsupportedStructureError(HdpcaError):
    """Spike structure outside the supported regime (e.g. a rate <= 1)."""


class BoundaryUnsupportedError(UnsupportedStructureError):
    """Parameter sits exactly on a regime boundary not covered by theory."""


class InsufficientDataError(HdpcaError):
    """Too few samples for the requested statistical procedure."""


class ConfigError(HdpcaError):
    """Run configuration is malformed or inconsistent."""


class ExperimentError(HdpcaError):
    """An experiment exceeded its replicate-failure budget."""
