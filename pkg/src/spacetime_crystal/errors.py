"""Exception and warning types shared across the package."""


class GridMismatch(ValueError):
    """Two fields live on different grids."""


class InvariantViolation(ArithmeticError):
    """A numerical invariant (positivity, unitarity, ...) failed beyond tolerance."""


class ConfigError(ValueError):
    """Invalid run configuration."""


class NumericalWarning(UserWarning):
    """Result is usable but a resolution or cutoff diagnostic tripped."""
