"""Exception and warning classes shared by the whole package."""


class ExtremalLabError(ValueError):
    """Base class for domain errors raised by extremal_lab."""


class EmptyInterior(ExtremalLabError):
    pass


class Unbounded(ExtremalLabError):
    pass


class DimensionTooLarge(ExtremalLabError):
    pass


class ApexOutside(ExtremalLabError):
    pass


class OutsideDomain(ExtremalLabError):
    pass


class ResolutionTooCoarse(ExtremalLabError):
    pass


class UnsupportedVariant(ExtremalLabError):
    pass


class NonConvergence(ExtremalLabError):
    """The minimizer search did not reach tolerance; ``best`` holds the best point found."""

    def __init__(self, message, best=None, value=None):
        super().__init__(message)
        self.best = best
        self.value = value


class BudgetExceeded(ExtremalLabError):
    """Subdivision cap reached; ``estimate`` holds the best bracket so far."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class NoNegativePart(ExtremalLabError):
    pass


class NotNormalized(ExtremalLabError):
    pass


class DegenerateScale(UserWarning):
    """Homothety with scale 0 collapses the polytope onto its center."""
