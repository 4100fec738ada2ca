"""Exception types shared across the package."""


class NumericalError(ArithmeticError):
    """A numeric routine failed to produce a trustworthy answer."""


class QuadratureError(NumericalError):
    pass


class RootNotFoundError(NumericalError):
    pass


class RegimeError(ValueError):
    """A formula was called outside the search regime it is valid for."""
