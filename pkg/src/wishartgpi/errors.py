"""Exception types shared across the package."""


class NotPositiveDefinite(ValueError):
    """Matrix fails a positive-definiteness requirement."""


class SingularPivot(ValueError):
    """A pivot block is numerically singular or an inverse failed validation."""


class IndexOutOfRange(IndexError):
    """Block index outside the block partition."""


class DomainError(ValueError):
    """Scalar argument outside the domain of a special function or moment."""


class CapExceeded(ValueError):
    """Requested size exceeds a hard cap on combinatorial growth."""


class InfiniteMoment(ValueError):
    """Requested Monte Carlo moment is provably infinite or not guaranteed finite."""


class DegenerateVariance(RuntimeError):
    """All Monte Carlo draws identical; stderr would be meaningless."""


class DegenerateEvent(RuntimeError):
    """An estimated event probability is exactly 0 or 1; no z-score exists."""


class DivergentIntegral(ValueError):
    """Integral parameters outside the convergence region."""


class UpperBoundUnavailable(ValueError):
    """Closed-form upper bound not computable for the requested exponents."""


class ConfigError(ValueError):
    """Experiment configuration failed validation."""
