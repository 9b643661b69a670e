"""Exception hierarchy shared across the package.

Every error raised on a documented failure path derives from
:class:`PolyidentError`, so callers can catch one type at API boundaries.
"""


class PolyidentError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(PolyidentError, ValueError):
    """An argument violates a documented precondition."""


class RankError(PolyidentError):
    """A requested construction exceeds the rank the data can support."""


class RankDeficiencyError(RankError):
    """A truncated SVD or pseudoinverse has too few usable singular values."""


class DegeneracyError(PolyidentError):
    """A computation hit a degenerate configuration (coincident poles,
    ill-conditioned Vandermonde system, vanishing basis norm)."""


class SingularityError(PolyidentError):
    """A value sits on a mathematical singularity (e.g. log of zero)."""


class ExtrapolationError(PolyidentError):
    """A reconstruction grid extends beyond the sampled interval."""


class WeightingError(PolyidentError):
    """An error-covariance weighting matrix is unusable (not positive
    definite even after regularization)."""


class EstimationError(PolyidentError):
    """An estimator failed to produce the requested number of poles."""


class ConfigError(PolyidentError):
    """A configuration file is malformed, has unknown keys, or fails
    validation."""
