"""Exception types shared across the package."""


class GeometryError(ValueError):
    """Lattice geometry is invalid (e.g. fewer than two sites)."""


class CapacityError(ValueError):
    """Requested qubit count exceeds the dense-matrix capacity cap."""


class DiagonalizationError(RuntimeError):
    """Eigensolver received bad input or failed to converge."""


class InsufficientStatisticsError(RuntimeError):
    """Too few levels in the analysis window for spacing statistics."""


class DegenerateWindowError(RuntimeError):
    """All window levels coincide; spacings cannot be normalized."""


class NotBracketedError(RuntimeError):
    """Observable never crosses the target value on the sweep grid."""


class ConfigError(ValueError):
    """Run configuration is malformed or violates an invariant."""
