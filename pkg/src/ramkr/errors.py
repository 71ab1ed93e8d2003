"""Exception types shared across the package."""


class PrecisionExhausted(ArithmeticError):
    """A valuation or zero test cannot be certified at the tracked precision."""


class SingularMatrix(ValueError):
    pass


class DegenerateInput(ValueError):
    """Input vectors are linearly dependent (or zero)."""


class NotRepresentable(ValueError):
    """The class is not the Gram class of any pair in the split plane."""


class IsotropicVector(ValueError):
    pass


class RegionExceeded(RuntimeError):
    """A tree search left its node or radius budget."""


class InvalidClass(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class UnsupportedPairing(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    """An enumeration would exceed its state budget."""
