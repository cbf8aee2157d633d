"""Exception types shared across the package."""


class AoaLabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(AoaLabError, ValueError):
    """An input is outside the supported domain (bad probability, bad flag, bad file)."""


class NumericalError(AoaLabError, ArithmeticError):
    """A closed-form evaluation lost all precision (denominator underflowed to zero)."""


class ConvergenceError(AoaLabError, RuntimeError):
    """An iterative solver exceeded its iteration cap without meeting tolerance."""


class TruncationError(AoaLabError, RuntimeError):
    """Estimated stationary mass beyond the level cap is too large; raise the cap."""


class CapError(AoaLabError, ValueError):
    """The requested tail tolerance needs an unreasonably large level cap."""
