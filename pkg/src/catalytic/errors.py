"""Exception hierarchy shared by every module."""


class CatalyticError(Exception):
    """Base class for all errors raised by the package."""


class ParameterError(CatalyticError, ValueError):
    """Inputs violate a model invariant."""


class DomainError(CatalyticError, ValueError):
    """A quantity is undefined at the requested point (e.g. a derivative at sigma = 0)."""


class NumericalError(CatalyticError, ArithmeticError):
    """A numerical routine failed to converge or lost accuracy.

    ``diagnostics`` carries whatever the routine knew when it gave up.
    """

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class QuadratureError(NumericalError):
    pass


class ThresholdNotFound(NumericalError):
    pass


class InfeasibleMoments(CatalyticError, ValueError):
    """Observed moments cannot be generated by the model.

    ``moment`` names the equation that has no solution.
    """

    def __init__(self, message, moment):
        super().__init__(message)
        self.moment = moment


class AlwaysExploreEnvironment(CatalyticError, ValueError):
    """The switching value alone already justifies exploring the low type."""
